#pragma once

// Synthetic corpus generator with constructively planted triggers.
//
// Every planted trigger instance is built so the detection rules must
// flag it (k identical shares for availability, k near-duplicate
// originals for illusory truth, and so on), and every non-planted tweet
// is verified clean against the same detectors before emission. That
// makes the generator an exact oracle: detection on a generated corpus
// must reproduce the planted flags bit for bit.
//
// Engagement counts are drawn from a log-linear model with known
// coefficients, so the regression stage can be checked against ground
// truth as well.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/triggers.hpp"

namespace biaslens {

// Log-linear engagement model for one metric:
//   count = max(0, round(exp(alpha[0] + sum_c alpha[1+c] * flag_c + eps) - 1))
// with eps ~ N(0, sigma^2). alpha is intercept-first, then the seven
// constructs in their fixed order.
struct EngagementModel {
    std::array<double, kConstructCount + 1> alpha{};
    double sigma = 0.0;
};

// Extra co-occurrence: whenever `first` is planted on a tweet (or block),
// also plant `second` there with the given probability. Only text-level
// constructs can be added this way; see SimulationConfig::validate.
struct CooccurrenceBoost {
    Construct first = Construct::Homophily;
    Construct second = Construct::Authority;
    double probability = 0.0;
};

struct SimulationConfig {
    std::uint64_t seed = 0;
    std::int64_t n_bots = 0;
    std::int64_t n_humans = 0;
    // Timeline length per user, uniform on [tweets_min, tweets_max].
    std::int64_t tweets_min = 0;
    std::int64_t tweets_max = 0;
    // Target fraction of the cohort's tweets carrying each construct,
    // indexed by construct order. Boosts add co-occurrence on top.
    std::array<double, kConstructCount> prevalence_bot{};
    std::array<double, kConstructCount> prevalence_human{};
    std::vector<CooccurrenceBoost> boosts;
    std::map<std::string, EngagementModel> engagement;  // by metric name
    // The thresholds the corpus is planted against; detection must run
    // with the same values for exact recovery.
    ThresholdConfig thresholds;
    double bot_score_bot = 0.9;
    double bot_score_human = 0.1;
    // Conforming tweets emitted after the divergent one per dissonant user.
    std::int64_t dissonance_conforming = 2;
    double filler_share_probability = 0.1;
    std::string lexicon_dir;  // optional; the CLI may override

    void validate() const;  // throws ConfigError
};

SimulationConfig parse_simulation_config(const nlohmann::json& doc);
SimulationConfig load_simulation_config(const std::string& path);

struct GroundTruth {
    std::vector<TriggerVector> vectors;  // ordered by tweet_id
};

struct SimulationOutput {
    // Grouped by author user_id (lexicographic), timeline order within.
    std::vector<TweetRecord> tweets;
    std::vector<UserProfile> profiles;  // sorted by user_id
    GroundTruth truth;
};

// Deterministic in (config, lexicon): the same inputs give bitwise
// identical output at any job count. Throws ConfigError when the lexicon
// cannot support the requested planting (e.g. fewer emotion terms than
// the affect threshold).
SimulationOutput generate_corpus(const SimulationConfig& config, const Lexicon& lexicon,
                                 int jobs = 1);

struct ConstructConfusion {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::size_t true_negatives = 0;
};

struct ConfusionReport {
    std::array<ConstructConfusion, kConstructCount> by_construct{};
    std::size_t tweets = 0;
    bool exact_match = false;  // zero false entries across all constructs
};

// Compares detector output against planted truth per construct. Throws
// CoverageError unless both sides cover exactly the same tweet ids.
ConfusionReport verify_against_truth(const std::vector<TriggerVector>& detected,
                                     const std::vector<TriggerVector>& truth);

}  // namespace biaslens
