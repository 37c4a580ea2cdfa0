#include "biaslens/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>
#include <unordered_map>

#include "biaslens/errors.hpp"
#include "biaslens/parallel.hpp"
#include "biaslens/sha256.hpp"

namespace biaslens {

namespace {

// Concatenates per-user value lists in user order so the distribution
// stats see one fixed summation order at any job count.
std::vector<double> flatten(const std::vector<std::vector<double>>& per_user) {
    std::vector<double> out;
    for (const auto& v : per_user) out.insert(out.end(), v.begin(), v.end());
    return out;
}

void derive_or_keep(const std::vector<double>& values, int fallback, const char* cue,
                    ThresholdConfig& config, int* slot) {
    CueAudit audit;
    if (values.empty()) {
        audit.k = fallback;
        *slot = fallback;
    } else {
        DerivedThreshold d = derive_threshold(values);
        audit.mu = d.mu;
        audit.sigma = d.sigma;
        audit.k = d.k;
        *slot = d.k;
    }
    config.audit[cue] = audit;
}

}  // namespace

ThresholdConfig resolve_thresholds(const Corpus& corpus, const Lexicon& lexicon,
                                   ThresholdConfig base, const StanceFn& stance,
                                   const EmbeddingProvider& provider, int jobs) {
    base.validate();
    if (base.mode == "fixed") return base;

    const auto& tweets = corpus.tweets();
    std::vector<double> emotion_counts(tweets.size()), negative_counts(tweets.size());
    parallel_chunks(tweets.size(), jobs, 1024, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto tokens = tokenize(tweets[i].text);
            emotion_counts[i] =
                static_cast<double>(lexicon.count_category(tokens, LexCategory::Emotion));
            negative_counts[i] =
                static_cast<double>(lexicon.count_category(tokens, LexCategory::Negative));
        }
    });

    const auto& users = corpus.user_ids();
    std::vector<std::vector<double>> group_sizes(users.size());
    std::vector<std::vector<double>> cluster_sizes(users.size());
    std::vector<std::vector<double>> run_sizes(users.size());
    parallel_chunks(users.size(), jobs, 64, [&](std::size_t begin, std::size_t end) {
        for (std::size_t u = begin; u < end; ++u) {
            const auto& timeline = corpus.timeline(users[u]);

            std::unordered_map<std::string, double> groups;
            std::vector<std::pair<std::string, std::string>> originals;
            for (std::size_t idx : timeline) {
                const TweetRecord& t = tweets[idx];
                if (is_share(t)) {
                    groups[share_key(t)] += 1.0;
                } else {
                    originals.emplace_back(t.tweet_id, t.text);
                }
            }
            for (const auto& [key, n] : groups) {
                (void)key;
                group_sizes[u].push_back(n);
            }
            std::sort(group_sizes[u].begin(), group_sizes[u].end());

            for (const auto& cluster :
                 near_duplicate_clusters(originals, base.similarity, provider)) {
                cluster_sizes[u].push_back(
                    static_cast<double>(cluster.member_tweet_ids.size()));
            }

            // Distinct texts per maximal same-stance run, mirroring the
            // confirmation rule's run construction.
            std::set<std::string> run_texts;
            Stance run_stance = Stance::Neutral;
            auto close_run = [&]() {
                if (!run_texts.empty()) {
                    run_sizes[u].push_back(static_cast<double>(run_texts.size()));
                }
                run_texts.clear();
            };
            for (std::size_t idx : timeline) {
                Stance s = stance(tweets[idx].text);
                if (s == Stance::Neutral) {
                    if (base.confirmation_strict) close_run();
                    continue;
                }
                if (run_texts.empty() || s == run_stance) {
                    run_stance = s;
                    run_texts.insert(tweets[idx].text);
                } else {
                    close_run();
                    run_stance = s;
                    run_texts.insert(tweets[idx].text);
                }
            }
            close_run();
        }
    });

    ThresholdConfig resolved = base;
    resolved.audit.clear();
    derive_or_keep(emotion_counts, base.k_affect, "affect", resolved, &resolved.k_affect);
    derive_or_keep(negative_counts, base.k_negativity, "negativity", resolved,
                   &resolved.k_negativity);
    derive_or_keep(flatten(group_sizes), base.k_availability, "availability", resolved,
                   &resolved.k_availability);
    derive_or_keep(flatten(cluster_sizes), base.k_illusory, "illusory_truth", resolved,
                   &resolved.k_illusory);
    derive_or_keep(flatten(run_sizes), base.k_confirmation, "confirmation", resolved,
                   &resolved.k_confirmation);
    resolved.validate();
    return resolved;
}

DetectOutcome detect_all(const Corpus& corpus, const Lexicon& lexicon,
                         const ThresholdConfig& base, const EmbeddingProvider& provider,
                         int jobs) {
    DetectOutcome out;
    StanceFn stance = default_stance_fn(lexicon);
    out.resolved = resolve_thresholds(corpus, lexicon, base, stance, provider, jobs);
    out.stances = compute_tweet_stances(corpus, stance, jobs);
    std::vector<bool> dissonance = dissonance_flags(corpus, stance, jobs, &out.stances);
    out.detection = assemble_trigger_vectors(corpus, lexicon, out.resolved, stance,
                                             &dissonance, provider, jobs, &out.stances);
    return out;
}

PipelineResult run_pipeline(const PipelineOptions& options) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;

    if (options.format != "json" && options.format != "csv" && options.format != "both") {
        throw ConfigError("format must be json, csv, or both");
    }
    options.thresholds.validate();
    if (options.out_dir.empty()) throw ConfigError("an output directory is required");

    PipelineResult result;
    RunManifest manifest;
    manifest.command = options.command;
    manifest.jobs = options.jobs;

    auto t0 = clock::now();
    auto record = [&](const char* stage) {
        auto t1 = clock::now();
        manifest.timings.push_back(
            {stage, std::chrono::duration<double>(t1 - t0).count()});
        t0 = t1;
    };

    Corpus corpus = load_corpus(options.tweets_path, options.profiles_path, &result.load);
    record("load");

    Lexicon lexicon = Lexicon::load_directory(options.lexicon_dir);
    corpus.annotate_profiles(lexicon);
    EmbeddingProvider provider = options.embedding_sidecar.empty()
                                     ? EmbeddingProvider()
                                     : EmbeddingProvider::with_sidecar(options.embedding_sidecar);
    record("lexicon");

    DetectOutcome det = detect_all(corpus, lexicon, options.thresholds, provider, options.jobs);
    result.resolved = det.resolved;
    result.tweets = corpus.tweets().size();
    for (const auto& v : det.detection.vectors) {
        if (v.flags.trigger_count() > 0) ++result.flagged_tweets;
    }
    if (det.detection.homophily_source_misses > 0) {
        result.notices.push_back(std::to_string(det.detection.homophily_source_misses) +
                                 " shares reference sources missing from the corpus; "
                                 "homophily was not assessable there");
    }
    record("detect");

    std::vector<Cohort> cohorts = cohort_assignments(corpus, det.resolved.bot_cutoff);
    bool have_prevalence = true;
    PrevalenceReport prevalence;
    try {
        prevalence = prevalence_by_cohort(det.detection.vectors, corpus, cohorts);
    } catch (const EmptyCohortError& e) {
        have_prevalence = false;
        result.notices.push_back(std::string(e.what()) + "; prevalence report skipped");
    }
    CooccurrenceMatrix co_bot = cooccurrence(det.detection.vectors, corpus, cohorts, Cohort::Bot);
    CooccurrenceMatrix co_human =
        cooccurrence(det.detection.vectors, corpus, cohorts, Cohort::Human);
    RegressionReport regression = regress_all(corpus, det.detection.vectors, cohorts);
    for (const auto& n : regression.notices) result.notices.push_back(n);
    CurveReport curve_bot =
        engagement_by_trigger_count(corpus, det.detection.vectors, cohorts, Cohort::Bot);
    CurveReport curve_human =
        engagement_by_trigger_count(corpus, det.detection.vectors, cohorts, Cohort::Human);
    DescriptiveStats stats = descriptive_stats(corpus, cohorts, lexicon);
    record("analytics");

    fs::create_directories(options.out_dir);
    auto write = [&](const std::string& name, const std::string& content) {
        write_file_atomic((fs::path(options.out_dir) / name).string(), content);
        result.files_written.push_back(name);
    };
    bool json = options.format != "csv";
    bool csv = options.format != "json";

    write("flags.jsonl", serialize_trigger_vectors(det.detection.vectors));
    write("threshold_audit.json", threshold_audit_to_json(det.resolved));
    write("load_report.json", load_report_to_json(result.load));
    if (have_prevalence) {
        if (json) write("prevalence.json", prevalence_to_json(prevalence));
        if (csv) write("prevalence.csv", prevalence_to_csv(prevalence));
    }
    if (json) {
        write("cooccurrence_bot.json", cooccurrence_to_json(co_bot));
        write("cooccurrence_human.json", cooccurrence_to_json(co_human));
        write("regression.json", regression_to_json(regression));
        write("curve_bot.json", curve_to_json(curve_bot));
        write("curve_human.json", curve_to_json(curve_human));
        write("stats.json", stats_to_json(stats));
    }
    if (csv) {
        write("cooccurrence_bot.csv", cooccurrence_to_csv(co_bot));
        write("cooccurrence_human.csv", cooccurrence_to_csv(co_human));
        write("regression.csv", regression_to_csv(regression));
        write("curve_bot.csv", curve_to_csv(curve_bot));
        write("curve_human.csv", curve_to_csv(curve_human));
        write("stats.csv", stats_to_csv(stats));
    }
    write("cooccurrence_bot.svg", cooccurrence_to_svg(co_bot));
    write("cooccurrence_human.svg", cooccurrence_to_svg(co_human));

    manifest.input_digests["tweets"] = sha256_file_hex(options.tweets_path);
    if (!options.profiles_path.empty()) {
        manifest.input_digests["profiles"] = sha256_file_hex(options.profiles_path);
    }
    if (!options.embedding_sidecar.empty()) {
        manifest.input_digests["embedding_sidecar"] =
            sha256_file_hex(options.embedding_sidecar);
    }
    for (LexCategory c : {LexCategory::Affiliation, LexCategory::Authority, LexCategory::Emotion,
                          LexCategory::Negative, LexCategory::StancePro,
                          LexCategory::StanceAnti}) {
        const char* name = lex_category_file(c);
        manifest.lexicon_digests[name] =
            sha256_file_hex((fs::path(options.lexicon_dir) / name).string());
    }
    manifest.thresholds = det.resolved;
    record("write");
    write("run_manifest.json", manifest_to_json(manifest));
    return result;
}

}  // namespace biaslens
