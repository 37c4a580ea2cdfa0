#pragma once

// Ego interaction networks and the cognitive dissonance rule.
//
// An ego's neighbors are every user it interacted with (retweet, quote,
// reply, mention) plus every user that interacted with it. Each neighbor
// votes with the modal non-Neutral stance of its own tweets (ties and
// all-Neutral abstain). The network majority is the stance held by a
// strict majority of the non-abstaining neighbors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/triggers.hpp"

namespace biaslens {

struct EgoEdge {
    std::string neighbor_id;
    std::string kind;  // "retweet" | "quote" | "reply" | "mention"
    std::string tweet_id;
};

struct EgoNetwork {
    std::string ego_id;
    std::vector<std::string> neighbors;  // sorted, ego excluded
    std::vector<EgoEdge> edges;          // sorted by (neighbor, kind, tweet)
};

// Throws UnknownUserError if the ego has no tweets.
EgoNetwork build_ego_network(const Corpus& corpus, const std::string& ego_id);

enum class MajorityStance { Pro, Anti, NoMajority };

const char* majority_name(MajorityStance m);

// Modal non-Neutral stance of a user's own tweets; nullopt on a tie or
// when every tweet is Neutral.
std::optional<Stance> modal_stance(const Corpus& corpus, const std::string& user_id,
                                   const StanceFn& stance);

MajorityStance network_majority_stance(const Corpus& corpus, const EgoNetwork& network,
                                       const StanceFn& stance);

// Flags the conforming tweets of a stance shift: a stance-bearing tweet is
// flagged iff its stance equals the network majority and some earlier
// stance-bearing tweet of the ego diverged from that majority. The
// divergent tweet itself is never flagged.
std::vector<std::size_t> detect_cognitive_dissonance(const Corpus& corpus,
                                                     const std::vector<std::size_t>& timeline,
                                                     MajorityStance majority,
                                                     const StanceFn& stance);

// Whole-corpus pass: per-tweet dissonance flags (indexed like
// corpus.tweets()). Neighbor votes are precomputed once per user.
// `stances` may carry the shared per-tweet stance cache.
std::vector<bool> dissonance_flags(const Corpus& corpus, const StanceFn& stance, int jobs,
                                   const std::vector<Stance>* stances = nullptr);

// One "ego<TAB>neighbor<TAB>kind<TAB>tweet_id" line per edge.
std::string dump_edge_list(const EgoNetwork& network);

}  // namespace biaslens
