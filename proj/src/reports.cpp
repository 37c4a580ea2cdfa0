#include "biaslens/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "biaslens/errors.hpp"

namespace biaslens {

namespace {

using ordered_json = nlohmann::ordered_json;

// CSV numbers: enough digits to be useful, few enough to stay readable.
// The JSON writers carry full precision.
std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string dump_doc(const ordered_json& doc) { return doc.dump(2) + "\n"; }

const char* kFlagFields[] = {"homophily",  "authority", "availability",
                             "illusory_truth", "affect", "negativity",
                             "cognitive_dissonance", "confirmation"};

bool* flag_slot(TriggerFlags& f, std::size_t i) {
    bool* slots[] = {&f.homophily,  &f.authority, &f.availability,
                     &f.illusory_truth, &f.affect, &f.negativity,
                     &f.cognitive_dissonance, &f.confirmation};
    return slots[i];
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("short write: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

// --- Trigger vector rows ----------------------------------------------------

nlohmann::ordered_json trigger_vector_to_json(const TriggerVector& v) {
    ordered_json row;
    row["tweet_id"] = v.tweet_id;
    TriggerFlags f = v.flags;
    for (std::size_t i = 0; i < 8; ++i) row[kFlagFields[i]] = *flag_slot(f, i);
    row["trigger_count"] = v.flags.trigger_count();
    return row;
}

TriggerVector trigger_vector_from_json(const nlohmann::json& j) {
    TriggerVector v;
    try {
        v.tweet_id = j.at("tweet_id").get<std::string>();
        for (std::size_t i = 0; i < 8; ++i) {
            *flag_slot(v.flags, i) = j.at(kFlagFields[i]).get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad trigger row: ") + e.what());
    }
    return v;
}

std::string serialize_trigger_vectors(const std::vector<TriggerVector>& vectors) {
    std::string out;
    for (const auto& v : vectors) {
        out += trigger_vector_to_json(v).dump();
        out += '\n';
    }
    return out;
}

std::vector<TriggerVector> load_trigger_vectors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trigger file: " + path);
    std::vector<TriggerVector> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        try {
            out.push_back(trigger_vector_from_json(j));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

// --- Corpus emission --------------------------------------------------------

std::string serialize_tweets(const std::vector<TweetRecord>& tweets) {
    std::string out;
    for (const auto& t : tweets) {
        out += serialize_tweet_record(t);
        out += '\n';
    }
    return out;
}

std::string serialize_profiles(const std::vector<UserProfile>& profiles) {
    std::string out;
    for (const auto& p : profiles) {
        out += serialize_user_profile(p);
        out += '\n';
    }
    return out;
}

// --- Prevalence -------------------------------------------------------------

namespace {

ordered_json cohort_prevalence_json(const CohortPrevalence& c) {
    ordered_json j;
    j["total_tweets"] = c.total_tweets;
    j["with_any_trigger"] = c.with_any_trigger;
    j["with_no_trigger"] = c.with_no_trigger;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        ordered_json row;
        row["construct"] = construct_name(static_cast<Construct>(i));
        row["flagged"] = c.by_construct[i].flagged;
        row["total"] = c.by_construct[i].total;
        row["proportion"] = c.by_construct[i].proportion;
        rows.push_back(row);
    }
    j["by_construct"] = rows;
    return j;
}

}  // namespace

std::string prevalence_to_json(const PrevalenceReport& report) {
    ordered_json doc;
    doc["bot"] = cohort_prevalence_json(report.bot);
    doc["human"] = cohort_prevalence_json(report.human);
    ordered_json tests = ordered_json::array();
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        ordered_json t;
        t["construct"] = construct_name(static_cast<Construct>(i));
        t["z"] = report.ztests[i].z;
        t["p"] = report.ztests[i].p;
        tests.push_back(t);
    }
    doc["bot_vs_human"] = tests;
    return dump_doc(doc);
}

std::string prevalence_to_csv(const PrevalenceReport& report) {
    std::string out =
        "construct,bot_flagged,bot_total,bot_proportion,"
        "human_flagged,human_total,human_proportion,z,p\n";
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        const auto& b = report.bot.by_construct[i];
        const auto& h = report.human.by_construct[i];
        out += construct_name(static_cast<Construct>(i));
        out += ',' + std::to_string(b.flagged) + ',' + std::to_string(b.total) + ',' +
               csv_num(b.proportion);
        out += ',' + std::to_string(h.flagged) + ',' + std::to_string(h.total) + ',' +
               csv_num(h.proportion);
        out += ',' + csv_num(report.ztests[i].z) + ',' + csv_num(report.ztests[i].p) + '\n';
    }
    auto extra = [&](const char* name, std::size_t b, std::size_t h) {
        out += name;
        out += ',' + std::to_string(b) + ',' + std::to_string(report.bot.total_tweets) + ',' +
               csv_num(report.bot.total_tweets
                           ? static_cast<double>(b) / static_cast<double>(report.bot.total_tweets)
                           : 0.0);
        out += ',' + std::to_string(h) + ',' + std::to_string(report.human.total_tweets) + ',' +
               csv_num(report.human.total_tweets
                           ? static_cast<double>(h) /
                                 static_cast<double>(report.human.total_tweets)
                           : 0.0);
        out += ",,\n";
    };
    extra("any_trigger", report.bot.with_any_trigger, report.human.with_any_trigger);
    extra("no_trigger", report.bot.with_no_trigger, report.human.with_no_trigger);
    return out;
}

// --- Co-occurrence ----------------------------------------------------------

std::string cooccurrence_to_json(const CooccurrenceMatrix& matrix) {
    ordered_json doc;
    ordered_json names = ordered_json::array();
    for (Construct c : all_constructs()) names.push_back(construct_name(c));
    doc["constructs"] = names;
    ordered_json rows = ordered_json::array();
    for (const auto& row : matrix) {
        ordered_json r = ordered_json::array();
        for (std::size_t v : row) r.push_back(v);
        rows.push_back(r);
    }
    doc["counts"] = rows;
    doc["note"] = "cell (i,j) counts tweets flagged with both constructs; "
                  "the diagonal is the per-construct flagged count";
    return dump_doc(doc);
}

std::string cooccurrence_to_csv(const CooccurrenceMatrix& matrix) {
    std::string out = "construct";
    for (Construct c : all_constructs()) {
        out += ',';
        out += construct_name(c);
    }
    out += '\n';
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        out += construct_name(static_cast<Construct>(i));
        for (std::size_t j = 0; j < kConstructCount; ++j) {
            out += ',' + std::to_string(matrix[i][j]);
        }
        out += '\n';
    }
    return out;
}

std::string cooccurrence_to_svg(const CooccurrenceMatrix& matrix) {
    std::size_t max_count = 1;
    for (const auto& row : matrix) {
        for (std::size_t v : row) max_count = std::max(max_count, v);
    }
    const int cell = 64, left = 190, top = 150;
    const int width = left + 7 * cell + 30;
    const int height = top + 7 * cell + 70;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"monospace\" font-size=\"13\">\n";
    svg << "<!-- color scale: linear from rgb(247,251,255) at 0 to rgb(8,48,107) at the "
           "matrix maximum ("
        << max_count << ") -->\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        const char* name = construct_name(static_cast<Construct>(i));
        int y = top + static_cast<int>(i) * cell;
        svg << "<text x=\"" << left - 8 << "\" y=\"" << y + cell / 2 + 4
            << "\" text-anchor=\"end\">" << name << "</text>\n";
        int x = left + static_cast<int>(i) * cell;
        svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << top - 8
            << "\" text-anchor=\"start\" transform=\"rotate(-55 " << x + cell / 2 << " "
            << top - 8 << ")\">" << name << "</text>\n";
    }
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        for (std::size_t j = 0; j < kConstructCount; ++j) {
            double t = static_cast<double>(matrix[i][j]) / static_cast<double>(max_count);
            int r = static_cast<int>(std::lround(247 + t * (8 - 247)));
            int g = static_cast<int>(std::lround(251 + t * (48 - 251)));
            int b = static_cast<int>(std::lround(255 + t * (107 - 255)));
            int x = left + static_cast<int>(j) * cell;
            int y = top + static_cast<int>(i) * cell;
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"rgb(" << r << ',' << g << ',' << b
                << ")\" stroke=\"white\"/>\n";
            const char* ink = t > 0.5 ? "white" : "black";
            svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
                << "\" text-anchor=\"middle\" fill=\"" << ink << "\">" << matrix[i][j]
                << "</text>\n";
        }
    }
    int ly = top + 7 * cell + 30;
    svg << "<text x=\"" << left << "\" y=\"" << ly
        << "\">shade: 0 (white) to " << max_count << " (dark blue), linear</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

// --- Regression -------------------------------------------------------------

namespace {

double percent_change(double coefficient) { return 100.0 * (std::exp(coefficient) - 1.0); }

// Flag-only marker for effects clearing the |coefficient| >= 0.01 bar
// (about a one percent engagement shift); interpretation is the reader's.
bool practical(double coefficient) { return std::abs(coefficient) >= 0.01; }

}  // namespace

std::string regression_to_json(const RegressionReport& report) {
    ordered_json doc;
    ordered_json models = ordered_json::array();
    for (const auto& m : report.models) {
        ordered_json mj;
        mj["cohort"] = cohort_name(m.cohort);
        mj["metric"] = m.metric;
        mj["n"] = m.fit.n;
        mj["df"] = m.fit.df;
        mj["r_squared"] = m.fit.r_squared;
        mj["residual_variance"] = m.fit.residual_variance;
        ordered_json terms = ordered_json::array();
        for (std::size_t i = 0; i < m.fit.terms.size(); ++i) {
            ordered_json t;
            t["term"] = m.fit.terms[i];
            t["coefficient"] = m.fit.coefficients[i];
            t["std_error"] = m.fit.std_errors[i];
            t["t"] = m.fit.t_values[i];
            t["p"] = m.fit.p_values[i];
            t["percent_change"] = percent_change(m.fit.coefficients[i]);
            t["practical"] = practical(m.fit.coefficients[i]);
            terms.push_back(t);
        }
        mj["terms"] = terms;
        mj["dropped"] = m.fit.dropped;
        models.push_back(mj);
    }
    doc["models"] = models;
    doc["notices"] = report.notices;
    doc["note"] = "response is log(1 + count); percent_change = 100*(exp(coefficient) - 1), "
                  "the multiplicative effect of the flag on 1 + count; practical marks "
                  "|coefficient| >= 0.01 without further interpretation";
    return dump_doc(doc);
}

std::string regression_to_csv(const RegressionReport& report) {
    std::string out = "cohort,metric,term,coefficient,std_error,t,p,percent_change,practical\n";
    for (const auto& m : report.models) {
        for (std::size_t i = 0; i < m.fit.terms.size(); ++i) {
            out += cohort_name(m.cohort);
            out += ',' + m.metric + ',' + m.fit.terms[i];
            out += ',' + csv_num(m.fit.coefficients[i]) + ',' + csv_num(m.fit.std_errors[i]) +
                   ',' + csv_num(m.fit.t_values[i]) + ',' + csv_num(m.fit.p_values[i]) + ',' +
                   csv_num(percent_change(m.fit.coefficients[i])) +
                   (practical(m.fit.coefficients[i]) ? ",1\n" : ",0\n");
        }
    }
    for (const auto& n : report.notices) {
        out += "# notice: " + n + '\n';
    }
    out += "# percent_change = 100*(exp(coefficient)-1); response is log(1+count)\n";
    out += "# practical = 1 when |coefficient| >= 0.01\n";
    return out;
}

// --- Curves -----------------------------------------------------------------

std::string curve_to_json(const CurveReport& report) {
    ordered_json doc;
    for (const auto& [metric, cells] : report.by_metric) {
        ordered_json rows = ordered_json::array();
        for (const auto& c : cells) {
            ordered_json r;
            r["trigger_count"] = c.trigger_count;
            r["n"] = c.n;
            r["mean_log"] = c.mean_log;
            r["q1"] = c.q1;
            r["median"] = c.median;
            r["q3"] = c.q3;
            rows.push_back(r);
        }
        doc[metric] = rows;
    }
    return dump_doc(doc);
}

std::string curve_to_csv(const CurveReport& report) {
    std::string out = "metric,trigger_count,n,mean_log,q1,median,q3\n";
    for (const auto& [metric, cells] : report.by_metric) {
        for (const auto& c : cells) {
            out += metric + ',' + std::to_string(c.trigger_count) + ',' + std::to_string(c.n) +
                   ',' + csv_num(c.mean_log) + ',' + csv_num(c.q1) + ',' + csv_num(c.median) +
                   ',' + csv_num(c.q3) + '\n';
        }
    }
    return out;
}

// --- Descriptive stats ------------------------------------------------------

std::string stats_to_json(const DescriptiveStats& stats) {
    ordered_json doc;
    for (const auto& [cohort, rows] : stats.by_cohort) {
        ordered_json out_rows = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json j;
            j["name"] = r.name;
            j["mean"] = r.mean;
            j["median"] = r.median;
            j["stddev"] = r.stddev;
            out_rows.push_back(j);
        }
        doc[cohort] = out_rows;
    }
    return dump_doc(doc);
}

std::string stats_to_csv(const DescriptiveStats& stats) {
    std::string out = "cohort,name,mean,median,stddev\n";
    for (const auto& [cohort, rows] : stats.by_cohort) {
        for (const auto& r : rows) {
            out += cohort + ',' + r.name + ',' + csv_num(r.mean) + ',' + csv_num(r.median) +
                   ',' + csv_num(r.stddev) + '\n';
        }
    }
    return out;
}

// --- Confusion --------------------------------------------------------------

std::string confusion_to_json(const ConfusionReport& report) {
    ordered_json doc;
    doc["tweets"] = report.tweets;
    doc["exact_match"] = report.exact_match;
    ordered_json by = ordered_json::object();
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        const auto& c = report.by_construct[i];
        ordered_json j;
        j["true_positives"] = c.true_positives;
        j["false_positives"] = c.false_positives;
        j["false_negatives"] = c.false_negatives;
        j["true_negatives"] = c.true_negatives;
        by[construct_name(static_cast<Construct>(i))] = j;
    }
    doc["by_construct"] = by;
    return dump_doc(doc);
}

std::string confusion_to_text(const ConfusionReport& report) {
    std::string out;
    for (std::size_t i = 0; i < kConstructCount; ++i) {
        const auto& c = report.by_construct[i];
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-22s tp=%-8zu fp=%-6zu fn=%-6zu tn=%zu\n",
                      construct_name(static_cast<Construct>(i)), c.true_positives,
                      c.false_positives, c.false_negatives, c.true_negatives);
        out += buf;
    }
    out += report.exact_match ? "exact match over " : "MISMATCHES over ";
    out += std::to_string(report.tweets) + " tweets\n";
    return out;
}

// --- Threshold audit and load report ----------------------------------------

std::string threshold_audit_to_json(const ThresholdConfig& config) {
    ordered_json doc;
    doc["mode"] = config.mode;
    doc["k_availability"] = config.k_availability;
    doc["k_illusory"] = config.k_illusory;
    doc["k_confirmation"] = config.k_confirmation;
    doc["k_affect"] = config.k_affect;
    doc["k_negativity"] = config.k_negativity;
    doc["similarity"] = config.similarity;
    doc["bot_cutoff"] = config.bot_cutoff;
    doc["confirmation_strict"] = config.confirmation_strict;
    ordered_json cues = ordered_json::object();
    for (const auto& [name, audit] : config.audit) {
        ordered_json c;
        c["mu"] = audit.mu;
        c["sigma"] = audit.sigma;
        c["k"] = audit.k;
        cues[name] = c;
    }
    doc["cues"] = cues;
    return dump_doc(doc);
}

std::string load_report_to_json(const LoadReport& report) {
    ordered_json doc;
    doc["tweets_read"] = report.tweets_read;
    doc["tweets_skipped"] = report.tweets_skipped;
    doc["profiles_read"] = report.profiles_read;
    doc["profiles_skipped"] = report.profiles_skipped;
    doc["profiles_synthesized"] = report.profiles_synthesized;
    ordered_json reasons = ordered_json::object();
    for (const auto& [reason, count] : report.skip_reasons) reasons[reason] = count;
    doc["skip_reasons"] = reasons;
    return dump_doc(doc);
}

// --- Run manifest -----------------------------------------------------------

std::string manifest_to_json(const RunManifest& manifest) {
    ordered_json doc;
    doc["tool"] = "biaslens";
    doc["version"] = kToolVersion;
    doc["command"] = manifest.command;
    doc["jobs"] = manifest.jobs;
    ordered_json inputs = ordered_json::object();
    for (const auto& [label, digest] : manifest.input_digests) inputs[label] = digest;
    doc["inputs"] = inputs;
    ordered_json lex = ordered_json::object();
    for (const auto& [name, digest] : manifest.lexicon_digests) lex[name] = digest;
    doc["lexicon"] = lex;
    doc["thresholds"] = nlohmann::ordered_json::parse(threshold_audit_to_json(manifest.thresholds));
    ordered_json timings = ordered_json::array();
    for (const auto& t : manifest.timings) {
        ordered_json j;
        j["stage"] = t.stage;
        j["seconds"] = t.seconds;
        timings.push_back(j);
    }
    doc["timings"] = timings;
    return dump_doc(doc);
}

}  // namespace biaslens
