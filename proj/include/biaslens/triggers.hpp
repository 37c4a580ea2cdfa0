#pragma once

// Trigger detection rules and thresholds.
//
// Eight per-tweet flags are detected; affect and negativity are merged
// into one reported construct (their flags co-travel almost perfectly in
// practice), so analytics count seven constructs:
//   homophily, authority, availability, illusory_truth,
//   affect_negativity (= affect OR negativity), cognitive_dissonance,
//   confirmation.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/similarity.hpp"

namespace biaslens {

enum class Construct {
    Homophily = 0,
    Authority = 1,
    Availability = 2,
    IllusoryTruth = 3,
    AffectNegativity = 4,
    CognitiveDissonance = 5,
    Confirmation = 6,
};

inline constexpr std::size_t kConstructCount = 7;

const char* construct_name(Construct c);
std::optional<Construct> construct_from_name(const std::string& name);

constexpr std::array<Construct, kConstructCount> all_constructs() {
    return {Construct::Homophily,        Construct::Authority,
            Construct::Availability,     Construct::IllusoryTruth,
            Construct::AffectNegativity, Construct::CognitiveDissonance,
            Construct::Confirmation};
}

struct TriggerFlags {
    bool homophily = false;
    bool authority = false;
    bool availability = false;
    bool illusory_truth = false;
    bool affect = false;
    bool negativity = false;
    bool cognitive_dissonance = false;
    bool confirmation = false;

    bool affect_negativity() const { return affect || negativity; }
    bool construct_flag(Construct c) const;
    // Number of distinct constructs present (affect/negativity count once).
    int trigger_count() const;

    bool operator==(const TriggerFlags&) const = default;
};

struct TriggerVector {
    std::string tweet_id;
    TriggerFlags flags;
};

// Repetition threshold from a cue distribution: k = max(1, ceil(mu+sigma))
// with mu the mean and sigma the population standard deviation.
// Throws EmptyInputError.
struct DerivedThreshold {
    int k = 1;
    double mu = 0.0;
    double sigma = 0.0;
};
DerivedThreshold derive_threshold(const std::vector<double>& cue_values);

struct CueAudit {
    double mu = 0.0;
    double sigma = 0.0;
    int k = 1;
};

struct ThresholdConfig {
    // Fixed defaults; auto mode replaces the k's with derived values.
    int k_availability = 3;
    int k_illusory = 3;
    int k_confirmation = 3;
    int k_affect = 3;
    int k_negativity = 2;
    double similarity = 0.8;   // in (0, 1]
    double bot_cutoff = 0.7;   // in [0, 1]
    std::string mode = "fixed";  // "fixed" | "auto"
    // In strict mode a Neutral tweet breaks a confirmation stance run;
    // by default Neutral tweets are skipped.
    bool confirmation_strict = false;
    // Per-cue distribution stats recorded when mode == "auto".
    std::map<std::string, CueAudit> audit;

    void validate() const;  // throws ConfigError on out-of-range values
};

using StanceFn = std::function<Stance(const std::string&)>;

StanceFn default_stance_fn(const Lexicon& lexicon);

// Stance of every tweet, indexed like corpus.tweets(). Detection passes
// share this cache so each text is tokenized once.
std::vector<Stance> compute_tweet_stances(const Corpus& corpus, const StanceFn& stance,
                                          int jobs);

// --- Per-tweet rules -------------------------------------------------------

bool detect_affect(const std::vector<std::string>& tokens, const Lexicon& lexicon, int k);
bool detect_negativity(const std::vector<std::string>& tokens, const Lexicon& lexicon, int k);

// Authority: an authority term in the tweet text, or a mentioned user
// whose bio carries authority terms, or the author's own bio does.
// Profiles must have been annotated.
bool detect_authority(const TweetRecord& tweet, const Corpus& corpus, const Lexicon& lexicon);

// Homophily: the tweet is a share and the share's source author has at
// least one affiliation in common with the tweet author. Returns false
// and bumps *source_misses when the source tweet is not in the corpus.
bool detect_homophily(const TweetRecord& tweet, const Corpus& corpus,
                      std::size_t* source_misses);

// --- Per-user rules --------------------------------------------------------

// Availability: the user shared the same tweet (same share key) at least
// k times; every share in such a group is flagged. `timeline` holds
// indexes into corpus.tweets() in (timestamp, tweet_id) order.
std::vector<std::size_t> detect_availability(const Corpus& corpus,
                                             const std::vector<std::size_t>& timeline, int k);

// Illusory truth: at least k distinct original (non-share) posts in a
// near-duplicate cluster at the given similarity; every member is flagged.
std::vector<std::size_t> detect_illusory_truth(const Corpus& corpus,
                                               const std::vector<std::size_t>& timeline,
                                               int k, double similarity,
                                               const EmbeddingProvider& provider);

// Confirmation, two routes:
//  (a) a run of >= k consecutive same-stance tweets with pairwise distinct
//      texts in the user's stance-bearing subsequence (Neutral tweets are
//      skipped unless strict); the run's members are flagged;
//  (b) a single tweet whose sentence split ([.!?] boundaries) yields >= 2
//      distinct sentences of the same non-Neutral stance.
std::vector<std::size_t> detect_confirmation(const Corpus& corpus,
                                             const std::vector<std::size_t>& timeline,
                                             int k, const StanceFn& stance, bool strict);

// Same rule with per-tweet stances already computed.
std::vector<std::size_t> detect_confirmation_cached(const Corpus& corpus,
                                                    const std::vector<std::size_t>& timeline,
                                                    int k, const std::vector<Stance>& stances,
                                                    const StanceFn& sentence_stance,
                                                    bool strict);

// Sentence split helper used by route (b); exposed for tests.
std::vector<std::string> split_sentences(const std::string& text);

// --- Assembly --------------------------------------------------------------

struct DetectionResult {
    // One entry per tweet, ordered by tweet_id.
    std::vector<TriggerVector> vectors;
    std::size_t homophily_source_misses = 0;
};

// Runs every rule over the corpus. `dissonance` maps tweet index ->
// flagged (computed by the network stage); pass nullptr to leave the
// cognitive dissonance flags unset. `stances` may carry the shared
// per-tweet stance cache; pass nullptr to compute it internally.
DetectionResult assemble_trigger_vectors(const Corpus& corpus, const Lexicon& lexicon,
                                         const ThresholdConfig& thresholds,
                                         const StanceFn& stance,
                                         const std::vector<bool>* dissonance,
                                         const EmbeddingProvider& provider, int jobs,
                                         const std::vector<Stance>* stances = nullptr);

}  // namespace biaslens
