#pragma once

// End-to-end orchestration shared by the CLI subcommands: load, annotate,
// resolve thresholds, detect, analytics, report. Every stage's output is
// a pure function of the inputs and the job count never changes results;
// wall-clock timings exist only in the run manifest.

#include <string>
#include <vector>

#include "biaslens/analytics.hpp"
#include "biaslens/corpus.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/network.hpp"
#include "biaslens/reports.hpp"
#include "biaslens/similarity.hpp"
#include "biaslens/triggers.hpp"

namespace biaslens {

// Threshold resolution. Fixed mode returns `base` unchanged (after
// validation). Auto mode derives each k as max(1, ceil(mu + sigma)) of
// its cue distribution over the whole corpus and records (mu, sigma, k)
// per cue in the audit map. Cue distributions:
//   affect         emotion-term count per tweet
//   negativity     negative-term count per tweet
//   availability   share-group size per (user, shared source)
//   illusory_truth near-duplicate cluster size per (user, cluster),
//                  originals only, at base.similarity
//   confirmation   distinct-text count per maximal same-stance run
// A cue with no observations keeps the fixed default and is recorded
// with mu = sigma = 0.
ThresholdConfig resolve_thresholds(const Corpus& corpus, const Lexicon& lexicon,
                                   ThresholdConfig base, const StanceFn& stance,
                                   const EmbeddingProvider& provider, int jobs);

struct DetectOutcome {
    ThresholdConfig resolved;
    std::vector<Stance> stances;  // indexed like corpus.tweets()
    DetectionResult detection;
};

// Threshold resolution, stance cache, dissonance pass, and the full
// trigger assembly.
DetectOutcome detect_all(const Corpus& corpus, const Lexicon& lexicon,
                         const ThresholdConfig& base, const EmbeddingProvider& provider,
                         int jobs);

struct PipelineOptions {
    std::string tweets_path;
    std::string profiles_path;
    std::string lexicon_dir;
    std::string out_dir;
    std::string embedding_sidecar;  // optional precomputed embeddings
    ThresholdConfig thresholds;
    int jobs = 1;
    std::string format = "both";  // "json" | "csv" | "both" (tabular reports)
    std::string command = "pipeline";
};

struct PipelineResult {
    LoadReport load;
    ThresholdConfig resolved;
    std::size_t tweets = 0;
    std::size_t flagged_tweets = 0;  // trigger_count >= 1
    std::vector<std::string> notices;
    std::vector<std::string> files_written;  // relative to out_dir
};

// Runs every stage and writes every report into out_dir. Analytics that
// require a cohort with no tweets are skipped with a notice rather than
// failing the run. run_manifest.json is the only output that varies
// between identical runs (timings).
PipelineResult run_pipeline(const PipelineOptions& options);

}  // namespace biaslens
