// biaslens: batch detection of cognitive-bias triggers in social-media
// corpora, with cohort analytics and a seeded synthetic-corpus generator.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "biaslens/errors.hpp"
#include "biaslens/pipeline.hpp"
#include "biaslens/reports.hpp"
#include "biaslens/sha256.hpp"
#include "biaslens/simulator.hpp"

namespace {

using namespace biaslens;
namespace fs = std::filesystem;

void add_threshold_flags(CLI::App* cmd, ThresholdConfig* t) {
    cmd->add_option("--thresholds", t->mode, "Threshold mode: fixed or auto")
        ->check(CLI::IsMember({"fixed", "auto"}))
        ->capture_default_str();
    cmd->add_option("--similarity", t->similarity, "Near-duplicate cosine threshold")
        ->capture_default_str();
    cmd->add_option("--bot-cutoff", t->bot_cutoff, "Bot probability cutoff")
        ->capture_default_str();
    cmd->add_option("--k-availability", t->k_availability, "Same-share repetition threshold")
        ->capture_default_str();
    cmd->add_option("--k-illusory", t->k_illusory, "Near-duplicate cluster threshold")
        ->capture_default_str();
    cmd->add_option("--k-confirmation", t->k_confirmation, "Stance-run threshold")
        ->capture_default_str();
    cmd->add_option("--k-affect", t->k_affect, "Emotion-term threshold")
        ->capture_default_str();
    cmd->add_option("--k-negativity", t->k_negativity, "Negative-term threshold")
        ->capture_default_str();
    cmd->add_flag("--confirmation-strict", t->confirmation_strict,
                  "Neutral tweets break confirmation runs instead of being skipped");
}

void print_load_report(const LoadReport& r) {
    std::cerr << "loaded " << r.tweets_read << " tweets (" << r.tweets_skipped
              << " skipped), " << r.profiles_read << " profiles (" << r.profiles_skipped
              << " skipped, " << r.profiles_synthesized << " synthesized)\n";
    for (const auto& [reason, count] : r.skip_reasons) {
        std::cerr << "  skip reason: " << reason << " x" << count << "\n";
    }
}

EmbeddingProvider make_provider(const std::string& sidecar) {
    return sidecar.empty() ? EmbeddingProvider() : EmbeddingProvider::with_sidecar(sidecar);
}

// Flags files supplied by the user must cover only known tweets; catch
// mismatches here as input errors before analytics treats them as
// internal ones.
void check_flag_coverage(const std::vector<TriggerVector>& vectors, const Corpus& corpus) {
    for (const auto& v : vectors) {
        if (!corpus.find_tweet(v.tweet_id)) {
            throw InputError("flags file references a tweet not in the corpus: " +
                             v.tweet_id);
        }
    }
}

struct AnalyticsArgs {
    std::string in, profiles, flags_path, out, format = "json", cohort = "bot";
    double bot_cutoff = 0.7;
};

// --in/--profiles/--flags/--out/--format common to the tabular report
// subcommands; `with_cohort` adds --cohort for the per-cohort ones.
void add_analytics_flags(CLI::App* cmd, AnalyticsArgs* a, bool with_cohort,
                         bool with_flags = true) {
    cmd->add_option("--in", a->in, "Tweet JSON-lines file")->required();
    cmd->add_option("--profiles", a->profiles, "Profile JSON-lines file");
    if (with_flags) {
        cmd->add_option("--flags", a->flags_path, "Trigger flags JSON-lines (from detect)")
            ->required();
    }
    cmd->add_option("--out", a->out, "Output file")->required();
    cmd->add_option("--format", a->format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--bot-cutoff", a->bot_cutoff, "Bot probability cutoff")
        ->capture_default_str();
    if (with_cohort) {
        cmd->add_option("--cohort", a->cohort, "bot or human")
            ->check(CLI::IsMember({"bot", "human"}))
            ->capture_default_str();
    }
}

Cohort parse_cohort(const std::string& name) {
    return name == "bot" ? Cohort::Bot : Cohort::Human;
}

int run(int argc, char** argv) {
    CLI::App app{"cognitive-bias trigger detection for social-media corpora"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    const char* kLexEnv = "BIASLENS_LEXICON";

    // filter ------------------------------------------------------------
    auto* filter = app.add_subcommand("filter", "Keep tweets matching reference narratives");
    struct {
        std::string in, profiles, narratives, out, categories, sidecar;
        double threshold = 0.8;
        int jobs = 1;
    } fargs;
    filter->add_option("--in", fargs.in, "Tweet JSON-lines file")->required();
    filter->add_option("--profiles", fargs.profiles, "Profile JSON-lines file");
    filter->add_option("--narratives", fargs.narratives,
                       "Reference narratives JSON-lines ({text, category})")
        ->required();
    filter->add_option("--threshold", fargs.threshold, "Minimum cosine to keep a tweet")
        ->capture_default_str();
    filter->add_option("--sidecar", fargs.sidecar, "Precomputed embedding sidecar");
    filter->add_option("--out", fargs.out, "Filtered tweet JSON-lines output")->required();
    filter->add_option("--categories", fargs.categories,
                       "Optional {tweet_id, category} JSON-lines output");
    filter->add_option("--jobs", fargs.jobs, "Worker limit")->capture_default_str();
    filter->callback([&] {
        LoadReport report;
        Corpus corpus = load_corpus(fargs.in, fargs.profiles, &report);
        print_load_report(report);
        auto references = load_reference_narratives(fargs.narratives);
        auto result = narrative_filter(corpus, references, fargs.threshold,
                                       make_provider(fargs.sidecar), fargs.jobs);
        std::string out, cats;
        for (const auto& [id, category] : result.kept) {
            out += serialize_tweet_record(*corpus.find_tweet(id));
            out += '\n';
            cats += nlohmann::ordered_json{{"tweet_id", id}, {"category", category}}.dump();
            cats += '\n';
        }
        write_file_atomic(fargs.out, out);
        if (!fargs.categories.empty()) write_file_atomic(fargs.categories, cats);
        std::cout << "kept " << result.kept.size() << " of "
                  << corpus.tweets().size() << " tweets (dropped " << result.dropped
                  << ")\n";
    });

    // detect ------------------------------------------------------------
    auto* detect = app.add_subcommand("detect", "Run every trigger rule over a corpus");
    struct {
        std::string in, profiles, lexicon, out, audit, manifest, sidecar;
        int jobs = 1;
        ThresholdConfig thresholds;
    } dargs;
    detect->add_option("--in", dargs.in, "Tweet JSON-lines file")->required();
    detect->add_option("--profiles", dargs.profiles, "Profile JSON-lines file");
    detect->add_option("--lexicon", dargs.lexicon, "Lexicon directory")
        ->envname(kLexEnv)
        ->required();
    detect->add_option("--out", dargs.out, "Trigger flags JSON-lines output")->required();
    detect->add_option("--audit", dargs.audit, "Threshold audit JSON output");
    detect->add_option("--manifest", dargs.manifest,
                       "Run manifest path (default: <out>.manifest.json)");
    detect->add_option("--sidecar", dargs.sidecar, "Precomputed embedding sidecar");
    detect->add_option("--jobs", dargs.jobs, "Worker limit")->capture_default_str();
    add_threshold_flags(detect, &dargs.thresholds);
    detect->callback([&] {
        LoadReport report;
        Corpus corpus = load_corpus(dargs.in, dargs.profiles, &report);
        print_load_report(report);
        Lexicon lexicon = Lexicon::load_directory(dargs.lexicon);
        corpus.annotate_profiles(lexicon);
        auto start = std::chrono::steady_clock::now();
        DetectOutcome outcome =
            detect_all(corpus, lexicon, dargs.thresholds, make_provider(dargs.sidecar),
                       dargs.jobs);
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_file_atomic(dargs.out, serialize_trigger_vectors(outcome.detection.vectors));
        if (!dargs.audit.empty()) {
            write_file_atomic(dargs.audit, threshold_audit_to_json(outcome.resolved));
        }
        RunManifest manifest;
        manifest.command = "detect";
        manifest.jobs = dargs.jobs;
        manifest.input_digests["tweets"] = sha256_file_hex(dargs.in);
        if (!dargs.profiles.empty()) {
            manifest.input_digests["profiles"] = sha256_file_hex(dargs.profiles);
        }
        for (LexCategory c : {LexCategory::Affiliation, LexCategory::Authority,
                              LexCategory::Emotion, LexCategory::Negative,
                              LexCategory::StancePro, LexCategory::StanceAnti}) {
            manifest.lexicon_digests[lex_category_file(c)] =
                sha256_file_hex((fs::path(dargs.lexicon) / lex_category_file(c)).string());
        }
        manifest.thresholds = outcome.resolved;
        manifest.timings.push_back({"detect", seconds});
        std::string manifest_path =
            dargs.manifest.empty() ? dargs.out + ".manifest.json" : dargs.manifest;
        write_file_atomic(manifest_path, manifest_to_json(manifest));
        std::size_t flagged = 0;
        for (const auto& v : outcome.detection.vectors) {
            if (v.flags.trigger_count() > 0) ++flagged;
        }
        if (outcome.detection.homophily_source_misses > 0) {
            std::cerr << outcome.detection.homophily_source_misses
                      << " shares reference sources missing from the corpus\n";
        }
        std::cout << "flagged " << flagged << " of " << outcome.detection.vectors.size()
                  << " tweets\n";
    });

    // prevalence ---------------------------------------------------------
    auto* prevalence = app.add_subcommand("prevalence",
                                          "Per-construct prevalence by cohort with z-tests");
    AnalyticsArgs pargs;
    add_analytics_flags(prevalence, &pargs, false);
    prevalence->callback([&] {
        Corpus corpus = load_corpus(pargs.in, pargs.profiles, nullptr);
        auto vectors = load_trigger_vectors(pargs.flags_path);
        check_flag_coverage(vectors, corpus);
        auto cohorts = cohort_assignments(corpus, pargs.bot_cutoff);
        PrevalenceReport report = prevalence_by_cohort(vectors, corpus, cohorts);
        write_file_atomic(pargs.out, pargs.format == "json" ? prevalence_to_json(report)
                                                            : prevalence_to_csv(report));
    });

    // cooccur ------------------------------------------------------------
    auto* cooccur = app.add_subcommand("cooccur", "Construct co-occurrence matrix");
    AnalyticsArgs cargs;
    cargs.format = "json";
    add_analytics_flags(cooccur, &cargs, true);
    cooccur->get_option("--format")->check(CLI::IsMember({"json", "csv", "svg"}));
    cooccur->callback([&] {
        Corpus corpus = load_corpus(cargs.in, cargs.profiles, nullptr);
        auto vectors = load_trigger_vectors(cargs.flags_path);
        check_flag_coverage(vectors, corpus);
        auto cohorts = cohort_assignments(corpus, cargs.bot_cutoff);
        CooccurrenceMatrix m =
            cooccurrence(vectors, corpus, cohorts, parse_cohort(cargs.cohort));
        std::string body = cargs.format == "svg"   ? cooccurrence_to_svg(m)
                           : cargs.format == "csv" ? cooccurrence_to_csv(m)
                                                   : cooccurrence_to_json(m);
        write_file_atomic(cargs.out, body);
    });

    // regress ------------------------------------------------------------
    auto* regress = app.add_subcommand(
        "regress", "Log-engagement on trigger dummies, one model per cohort and metric");
    AnalyticsArgs rargs;
    add_analytics_flags(regress, &rargs, false);
    regress->callback([&] {
        Corpus corpus = load_corpus(rargs.in, rargs.profiles, nullptr);
        auto vectors = load_trigger_vectors(rargs.flags_path);
        check_flag_coverage(vectors, corpus);
        auto cohorts = cohort_assignments(corpus, rargs.bot_cutoff);
        RegressionReport report = regress_all(corpus, vectors, cohorts);
        for (const auto& n : report.notices) std::cerr << "notice: " << n << "\n";
        write_file_atomic(rargs.out, rargs.format == "json" ? regression_to_json(report)
                                                            : regression_to_csv(report));
    });

    // curve --------------------------------------------------------------
    auto* curve =
        app.add_subcommand("curve", "Engagement distribution by per-tweet trigger count");
    AnalyticsArgs vargs;
    add_analytics_flags(curve, &vargs, true);
    curve->callback([&] {
        Corpus corpus = load_corpus(vargs.in, vargs.profiles, nullptr);
        auto vectors = load_trigger_vectors(vargs.flags_path);
        check_flag_coverage(vectors, corpus);
        auto cohorts = cohort_assignments(corpus, vargs.bot_cutoff);
        CurveReport report =
            engagement_by_trigger_count(corpus, vectors, cohorts, parse_cohort(vargs.cohort));
        write_file_atomic(vargs.out, vargs.format == "json" ? curve_to_json(report)
                                                            : curve_to_csv(report));
    });

    // stats --------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "Descriptive statistics per cohort");
    AnalyticsArgs sargs;
    std::string stats_lexicon;
    add_analytics_flags(stats, &sargs, false, false);
    stats->add_option("--lexicon", stats_lexicon, "Lexicon directory")
        ->envname(kLexEnv)
        ->required();
    stats->callback([&] {
        Corpus corpus = load_corpus(sargs.in, sargs.profiles, nullptr);
        Lexicon lexicon = Lexicon::load_directory(stats_lexicon);
        auto cohorts = cohort_assignments(corpus, sargs.bot_cutoff);
        DescriptiveStats report = descriptive_stats(corpus, cohorts, lexicon);
        write_file_atomic(sargs.out, sargs.format == "json" ? stats_to_json(report)
                                                            : stats_to_csv(report));
    });

    // simulate -----------------------------------------------------------
    auto* simulate =
        app.add_subcommand("simulate", "Generate a synthetic corpus with planted triggers");
    struct {
        std::string config, out_dir, lexicon;
        std::uint64_t seed = 0;
        int jobs = 1;
    } simargs;
    simulate->add_option("--config", simargs.config, "Simulation config JSON")->required();
    simulate->add_option("--out-dir", simargs.out_dir, "Output directory")->required();
    auto* seed_opt =
        simulate->add_option("--seed", simargs.seed, "Override the config's seed");
    simulate->add_option("--lexicon", simargs.lexicon,
                         "Lexicon directory (overrides the config's lexicon_dir)")
        ->envname(kLexEnv);
    simulate->add_option("--jobs", simargs.jobs, "Worker limit")->capture_default_str();
    simulate->callback([&] {
        SimulationConfig config = load_simulation_config(simargs.config);
        if (!seed_opt->empty()) config.seed = simargs.seed;
        std::string lexdir = !simargs.lexicon.empty() ? simargs.lexicon : config.lexicon_dir;
        if (lexdir.empty()) {
            throw ConfigError("a lexicon directory is required (config lexicon_dir, "
                              "--lexicon, or " + std::string(kLexEnv) + ")");
        }
        Lexicon lexicon = Lexicon::load_directory(lexdir);
        SimulationOutput out = generate_corpus(config, lexicon, simargs.jobs);
        fs::create_directories(simargs.out_dir);
        fs::path dir(simargs.out_dir);
        write_file_atomic((dir / "tweets.jsonl").string(), serialize_tweets(out.tweets));
        write_file_atomic((dir / "users.jsonl").string(), serialize_profiles(out.profiles));
        write_file_atomic((dir / "ground_truth.jsonl").string(),
                          serialize_trigger_vectors(out.truth.vectors));
        std::cout << "generated " << out.tweets.size() << " tweets by "
                  << out.profiles.size() << " accounts (seed " << config.seed << ")\n";
    });

    // verify -------------------------------------------------------------
    auto* verify =
        app.add_subcommand("verify", "Compare detector flags against simulator ground truth");
    struct {
        std::string detected, truth, out, format = "text";
    } verargs;
    verify->add_option("--detected", verargs.detected, "Flags JSON-lines from detect")
        ->required();
    verify->add_option("--truth", verargs.truth, "ground_truth.jsonl from simulate")
        ->required();
    verify->add_option("--out", verargs.out, "Optional JSON confusion report path");
    verify->add_option("--format", verargs.format, "Stdout format: text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    verify->callback([&] {
        ConfusionReport report = verify_against_truth(load_trigger_vectors(verargs.detected),
                                                      load_trigger_vectors(verargs.truth));
        std::cout << (verargs.format == "json" ? confusion_to_json(report)
                                               : confusion_to_text(report));
        if (!verargs.out.empty()) write_file_atomic(verargs.out, confusion_to_json(report));
    });

    // pipeline -----------------------------------------------------------
    auto* pipeline =
        app.add_subcommand("pipeline", "Detect and write every report in one run");
    PipelineOptions plargs;
    pipeline->add_option("--in", plargs.tweets_path, "Tweet JSON-lines file")->required();
    pipeline->add_option("--profiles", plargs.profiles_path, "Profile JSON-lines file");
    pipeline->add_option("--lexicon", plargs.lexicon_dir, "Lexicon directory")
        ->envname(kLexEnv)
        ->required();
    pipeline->add_option("--out-dir", plargs.out_dir, "Report directory")->required();
    pipeline->add_option("--sidecar", plargs.embedding_sidecar,
                         "Precomputed embedding sidecar");
    pipeline->add_option("--jobs", plargs.jobs, "Worker limit")->capture_default_str();
    pipeline->add_option("--format", plargs.format, "Tabular report format")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();
    add_threshold_flags(pipeline, &plargs.thresholds);
    pipeline->callback([&] {
        PipelineResult result = run_pipeline(plargs);
        print_load_report(result.load);
        for (const auto& n : result.notices) std::cerr << "notice: " << n << "\n";
        std::cout << result.flagged_tweets << " of " << result.tweets
                  << " tweets flagged; wrote " << result.files_written.size()
                  << " files to " << plargs.out_dir << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Contract: usage errors exit 1 (help and version exit 0).
        return app.exit(e) == 0 ? 0 : 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
