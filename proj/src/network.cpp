#include "biaslens/network.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "biaslens/errors.hpp"
#include "biaslens/parallel.hpp"

namespace biaslens {

namespace {

void add_edge(std::vector<EgoEdge>& edges, const std::string& ego,
              const std::string& neighbor, const char* kind, const std::string& tweet_id) {
    if (neighbor == ego || neighbor.empty()) {
        return;  // self-loops carry no outside influence
    }
    edges.push_back({neighbor, kind, tweet_id});
}

}  // namespace

EgoNetwork build_ego_network(const Corpus& corpus, const std::string& ego_id) {
    const auto& timeline = corpus.timeline(ego_id);
    if (timeline.empty()) {
        throw UnknownUserError("user has no tweets: " + ego_id);
    }

    EgoNetwork net;
    net.ego_id = ego_id;

    // Outgoing: whoever the ego retweeted, quoted, replied to, or mentioned.
    for (std::size_t idx : timeline) {
        const TweetRecord& t = corpus.tweets()[idx];
        auto author_of = [&](const std::string& tweet_id) -> std::string {
            const TweetRecord* src = corpus.find_tweet(tweet_id);
            return src ? src->author_id : std::string();
        };
        if (t.retweeted_tweet_id) {
            add_edge(net.edges, ego_id, author_of(*t.retweeted_tweet_id), "retweet", t.tweet_id);
        }
        if (t.quoted_tweet_id) {
            add_edge(net.edges, ego_id, author_of(*t.quoted_tweet_id), "quote", t.tweet_id);
        }
        if (t.replied_to_tweet_id) {
            add_edge(net.edges, ego_id, author_of(*t.replied_to_tweet_id), "reply", t.tweet_id);
        }
        for (const auto& m : t.mentioned_user_ids) {
            add_edge(net.edges, ego_id, m, "mention", t.tweet_id);
        }
    }

    // Incoming: whoever retweeted/quoted/replied to the ego's tweets or
    // mentioned the ego.
    for (std::size_t idx : timeline) {
        const TweetRecord& t = corpus.tweets()[idx];
        if (const auto* reactions = corpus.interactions_with(t.tweet_id)) {
            for (std::size_t r : *reactions) {
                const TweetRecord& other = corpus.tweets()[r];
                const char* kind = "reply";
                if (other.retweeted_tweet_id && *other.retweeted_tweet_id == t.tweet_id) {
                    kind = "retweet";
                } else if (other.quoted_tweet_id && *other.quoted_tweet_id == t.tweet_id) {
                    kind = "quote";
                }
                add_edge(net.edges, ego_id, other.author_id, kind, other.tweet_id);
            }
        }
    }
    if (const auto* mentions = corpus.mentions_of(ego_id)) {
        for (std::size_t r : *mentions) {
            const TweetRecord& other = corpus.tweets()[r];
            add_edge(net.edges, ego_id, other.author_id, "mention", other.tweet_id);
        }
    }

    std::sort(net.edges.begin(), net.edges.end(), [](const EgoEdge& a, const EgoEdge& b) {
        if (a.neighbor_id != b.neighbor_id) return a.neighbor_id < b.neighbor_id;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.tweet_id < b.tweet_id;
    });
    net.edges.erase(std::unique(net.edges.begin(), net.edges.end(),
                                [](const EgoEdge& a, const EgoEdge& b) {
                                    return a.neighbor_id == b.neighbor_id &&
                                           a.kind == b.kind && a.tweet_id == b.tweet_id;
                                }),
                    net.edges.end());

    std::unordered_set<std::string> seen;
    for (const auto& e : net.edges) {
        if (seen.insert(e.neighbor_id).second) {
            net.neighbors.push_back(e.neighbor_id);
        }
    }
    std::sort(net.neighbors.begin(), net.neighbors.end());
    return net;
}

const char* majority_name(MajorityStance m) {
    switch (m) {
        case MajorityStance::Pro: return "pro";
        case MajorityStance::Anti: return "anti";
        case MajorityStance::NoMajority: return "none";
    }
    return "none";
}

std::optional<Stance> modal_stance(const Corpus& corpus, const std::string& user_id,
                                   const StanceFn& stance) {
    std::size_t pro = 0, anti = 0;
    for (std::size_t idx : corpus.timeline(user_id)) {
        switch (stance(corpus.tweets()[idx].text)) {
            case Stance::Pro: ++pro; break;
            case Stance::Anti: ++anti; break;
            case Stance::Neutral: break;
        }
    }
    if (pro > anti) return Stance::Pro;
    if (anti > pro) return Stance::Anti;
    return std::nullopt;
}

MajorityStance network_majority_stance(const Corpus& corpus, const EgoNetwork& network,
                                       const StanceFn& stance) {
    std::size_t pro = 0, anti = 0;
    for (const auto& neighbor : network.neighbors) {
        auto vote = modal_stance(corpus, neighbor, stance);
        if (!vote) {
            continue;
        }
        if (*vote == Stance::Pro) {
            ++pro;
        } else {
            ++anti;
        }
    }
    // With only two possible votes, a strict majority of the non-abstaining
    // neighbors is simply the larger side.
    if (pro > anti) return MajorityStance::Pro;
    if (anti > pro) return MajorityStance::Anti;
    return MajorityStance::NoMajority;
}

std::vector<std::size_t> detect_cognitive_dissonance(const Corpus& corpus,
                                                     const std::vector<std::size_t>& timeline,
                                                     MajorityStance majority,
                                                     const StanceFn& stance) {
    std::vector<std::size_t> flagged;
    if (majority == MajorityStance::NoMajority) {
        return flagged;
    }
    Stance target = majority == MajorityStance::Pro ? Stance::Pro : Stance::Anti;
    bool seen_divergent = false;
    for (std::size_t idx : timeline) {
        Stance s = stance(corpus.tweets()[idx].text);
        if (s == Stance::Neutral) {
            continue;
        }
        if (s == target) {
            if (seen_divergent) {
                flagged.push_back(idx);
            }
        } else {
            seen_divergent = true;
        }
    }
    return flagged;
}

namespace {

std::optional<Stance> modal_stance_cached(const Corpus& corpus, const std::string& user_id,
                                          const std::vector<Stance>& stances) {
    std::size_t pro = 0, anti = 0;
    for (std::size_t idx : corpus.timeline(user_id)) {
        switch (stances[idx]) {
            case Stance::Pro: ++pro; break;
            case Stance::Anti: ++anti; break;
            case Stance::Neutral: break;
        }
    }
    if (pro > anti) return Stance::Pro;
    if (anti > pro) return Stance::Anti;
    return std::nullopt;
}

}  // namespace

std::vector<bool> dissonance_flags(const Corpus& corpus, const StanceFn& stance, int jobs,
                                   const std::vector<Stance>* stances) {
    std::vector<bool> flags(corpus.tweets().size(), false);
    const auto& users = corpus.user_ids();

    std::vector<Stance> local_stances;
    if (!stances) {
        local_stances = compute_tweet_stances(corpus, stance, jobs);
        stances = &local_stances;
    }

    // Neighbor votes get reused across egos, so compute each user's modal
    // stance once up front.
    std::vector<std::optional<Stance>> votes(users.size());
    std::unordered_map<std::string, std::size_t> user_pos;
    user_pos.reserve(users.size());
    for (std::size_t u = 0; u < users.size(); ++u) {
        user_pos[users[u]] = u;
    }
    parallel_chunks(users.size(), jobs, 256, [&](std::size_t begin, std::size_t end) {
        for (std::size_t u = begin; u < end; ++u) {
            votes[u] = modal_stance_cached(corpus, users[u], *stances);
        }
    });

    // vector<bool> bit-packs, so per-user results are staged per chunk and
    // merged single-threaded to keep writes race-free.
    constexpr std::size_t kChunk = 256;
    std::vector<std::vector<std::size_t>> chunk_flagged((users.size() + kChunk - 1) / kChunk);
    parallel_chunks(users.size(), jobs, kChunk, [&](std::size_t begin, std::size_t end) {
        auto& local = chunk_flagged[begin / kChunk];
        for (std::size_t u = begin; u < end; ++u) {
            const auto& timeline = corpus.timeline(users[u]);
            if (timeline.empty()) {
                continue;
            }
            // Any stance-bearing tweet after the first divergent one is what
            // gets flagged, so users with < 2 stance tweets can be skipped
            // before paying for network construction.
            std::size_t stance_bearing = 0;
            for (std::size_t idx : timeline) {
                if ((*stances)[idx] != Stance::Neutral) {
                    ++stance_bearing;
                }
            }
            if (stance_bearing < 2) {
                continue;
            }
            EgoNetwork net = build_ego_network(corpus, users[u]);
            std::size_t pro = 0, anti = 0;
            for (const auto& neighbor : net.neighbors) {
                auto it = user_pos.find(neighbor);
                std::optional<Stance> vote;
                if (it != user_pos.end()) {
                    vote = votes[it->second];
                } else {
                    vote = modal_stance_cached(corpus, neighbor, *stances);
                }
                if (!vote) continue;
                (*vote == Stance::Pro ? pro : anti) += 1;
            }
            MajorityStance majority = MajorityStance::NoMajority;
            if (pro > anti) majority = MajorityStance::Pro;
            if (anti > pro) majority = MajorityStance::Anti;
            if (majority == MajorityStance::NoMajority) {
                continue;
            }
            Stance target = majority == MajorityStance::Pro ? Stance::Pro : Stance::Anti;
            bool seen_divergent = false;
            for (std::size_t idx : timeline) {
                Stance s = (*stances)[idx];
                if (s == Stance::Neutral) {
                    continue;
                }
                if (s == target) {
                    if (seen_divergent) {
                        local.push_back(idx);
                    }
                } else {
                    seen_divergent = true;
                }
            }
        }
    });
    for (const auto& local : chunk_flagged) {
        for (std::size_t idx : local) {
            flags[idx] = true;
        }
    }
    return flags;
}

std::string dump_edge_list(const EgoNetwork& network) {
    std::string out;
    for (const auto& e : network.edges) {
        out += network.ego_id;
        out.push_back('\t');
        out += e.neighbor_id;
        out.push_back('\t');
        out += e.kind;
        out.push_back('\t');
        out += e.tweet_id;
        out.push_back('\n');
    }
    return out;
}

}  // namespace biaslens
