#include "biaslens/triggers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "biaslens/errors.hpp"
#include "biaslens/mathstats.hpp"
#include "biaslens/parallel.hpp"

namespace biaslens {

const char* construct_name(Construct c) {
    switch (c) {
        case Construct::Homophily: return "homophily";
        case Construct::Authority: return "authority";
        case Construct::Availability: return "availability";
        case Construct::IllusoryTruth: return "illusory_truth";
        case Construct::AffectNegativity: return "affect_negativity";
        case Construct::CognitiveDissonance: return "cognitive_dissonance";
        case Construct::Confirmation: return "confirmation";
    }
    return "";
}

std::optional<Construct> construct_from_name(const std::string& name) {
    for (Construct c : all_constructs()) {
        if (name == construct_name(c)) {
            return c;
        }
    }
    return std::nullopt;
}

bool TriggerFlags::construct_flag(Construct c) const {
    switch (c) {
        case Construct::Homophily: return homophily;
        case Construct::Authority: return authority;
        case Construct::Availability: return availability;
        case Construct::IllusoryTruth: return illusory_truth;
        case Construct::AffectNegativity: return affect_negativity();
        case Construct::CognitiveDissonance: return cognitive_dissonance;
        case Construct::Confirmation: return confirmation;
    }
    return false;
}

int TriggerFlags::trigger_count() const {
    int n = 0;
    for (Construct c : all_constructs()) {
        n += construct_flag(c) ? 1 : 0;
    }
    return n;
}

DerivedThreshold derive_threshold(const std::vector<double>& cue_values) {
    if (cue_values.empty()) {
        throw EmptyInputError("derive_threshold on empty cue distribution");
    }
    DerivedThreshold out;
    out.mu = mean(cue_values);
    out.sigma = population_stddev(cue_values);
    out.k = std::max(1, static_cast<int>(std::ceil(out.mu + out.sigma)));
    return out;
}

void ThresholdConfig::validate() const {
    if (k_availability < 1 || k_illusory < 1 || k_confirmation < 1 || k_affect < 1 ||
        k_negativity < 1) {
        throw ConfigError("repetition thresholds must be >= 1");
    }
    if (!(similarity > 0.0 && similarity <= 1.0)) {
        throw ConfigError("similarity threshold outside (0,1]");
    }
    if (!(bot_cutoff >= 0.0 && bot_cutoff <= 1.0)) {
        throw ConfigError("bot cutoff outside [0,1]");
    }
    if (mode != "fixed" && mode != "auto") {
        throw ConfigError("threshold mode must be 'fixed' or 'auto'");
    }
}

StanceFn default_stance_fn(const Lexicon& lexicon) {
    return [&lexicon](const std::string& text) { return stance_of(text, lexicon); };
}

std::vector<Stance> compute_tweet_stances(const Corpus& corpus, const StanceFn& stance,
                                          int jobs) {
    const auto& tweets = corpus.tweets();
    std::vector<Stance> stances(tweets.size(), Stance::Neutral);
    parallel_chunks(tweets.size(), jobs, 2048, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            stances[i] = stance(tweets[i].text);
        }
    });
    return stances;
}

bool detect_affect(const std::vector<std::string>& tokens, const Lexicon& lexicon, int k) {
    return lexicon.count_category(tokens, LexCategory::Emotion) >=
           static_cast<std::size_t>(k);
}

bool detect_negativity(const std::vector<std::string>& tokens, const Lexicon& lexicon, int k) {
    return lexicon.count_category(tokens, LexCategory::Negative) >=
           static_cast<std::size_t>(k);
}

bool detect_authority(const TweetRecord& tweet, const Corpus& corpus, const Lexicon& lexicon) {
    auto tokens = tokenize(tweet.text);
    if (lexicon.count_category(tokens, LexCategory::Authority) > 0) {
        return true;
    }
    for (const auto& mentioned : tweet.mentioned_user_ids) {
        const UserProfile* p = corpus.find_profile(mentioned);
        if (p && !p->authority_terms.empty()) {
            return true;
        }
    }
    const UserProfile* author = corpus.find_profile(tweet.author_id);
    return author && !author->authority_terms.empty();
}

bool detect_homophily(const TweetRecord& tweet, const Corpus& corpus,
                      std::size_t* source_misses) {
    if (!is_share(tweet)) {
        return false;
    }
    auto source_id = share_source_id(tweet);
    if (!source_id) {
        return false;
    }
    const TweetRecord* source = corpus.find_tweet(*source_id);
    if (!source) {
        if (source_misses) {
            ++*source_misses;
        }
        return false;
    }
    const UserProfile* author = corpus.find_profile(tweet.author_id);
    const UserProfile* source_author = corpus.find_profile(source->author_id);
    if (!author || !source_author) {
        return false;
    }
    for (const auto& a : author->affiliations) {
        if (std::find(source_author->affiliations.begin(), source_author->affiliations.end(),
                      a) != source_author->affiliations.end()) {
            return true;
        }
    }
    return false;
}

std::vector<std::size_t> detect_availability(const Corpus& corpus,
                                             const std::vector<std::size_t>& timeline, int k) {
    std::unordered_map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t idx : timeline) {
        const TweetRecord& t = corpus.tweets()[idx];
        if (is_share(t)) {
            groups[share_key(t)].push_back(idx);
        }
    }
    std::vector<std::size_t> flagged;
    for (auto& [key, members] : groups) {
        if (members.size() >= static_cast<std::size_t>(k)) {
            flagged.insert(flagged.end(), members.begin(), members.end());
        }
    }
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

std::vector<std::size_t> detect_illusory_truth(const Corpus& corpus,
                                               const std::vector<std::size_t>& timeline,
                                               int k, double similarity,
                                               const EmbeddingProvider& provider) {
    std::vector<std::pair<std::string, std::string>> originals;
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t idx : timeline) {
        const TweetRecord& t = corpus.tweets()[idx];
        if (!is_share(t)) {
            originals.emplace_back(t.tweet_id, t.text);
            index_of[t.tweet_id] = idx;
        }
    }
    std::vector<std::size_t> flagged;
    for (const auto& cluster : near_duplicate_clusters(originals, similarity, provider)) {
        if (cluster.member_tweet_ids.size() >= static_cast<std::size_t>(k)) {
            for (const auto& id : cluster.member_tweet_ids) {
                flagged.push_back(index_of.at(id));
            }
        }
    }
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> sentences;
    std::string current;
    auto flush = [&]() {
        std::size_t b = current.find_first_not_of(" \t\r\n");
        if (b != std::string::npos) {
            std::size_t e = current.find_last_not_of(" \t\r\n");
            sentences.push_back(current.substr(b, e - b + 1));
        }
        current.clear();
    };
    for (char ch : text) {
        if (ch == '.' || ch == '!' || ch == '?') {
            flush();
        } else {
            current.push_back(ch);
        }
    }
    flush();
    return sentences;
}

namespace {

// Route (b): >= 2 distinct sentences sharing one non-Neutral stance.
bool confirmation_by_sentences(const std::string& text, const StanceFn& stance) {
    auto sentences = split_sentences(text);
    if (sentences.size() < 2) {
        return false;
    }
    std::unordered_set<std::string> pro_seen, anti_seen;
    for (const auto& s : sentences) {
        switch (stance(s)) {
            case Stance::Pro: pro_seen.insert(s); break;
            case Stance::Anti: anti_seen.insert(s); break;
            case Stance::Neutral: break;
        }
        if (pro_seen.size() >= 2 || anti_seen.size() >= 2) {
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<std::size_t> detect_confirmation_cached(const Corpus& corpus,
                                                    const std::vector<std::size_t>& timeline,
                                                    int k, const std::vector<Stance>& stances,
                                                    const StanceFn& sentence_stance,
                                                    bool strict) {
    std::vector<std::size_t> flagged;

    // Stance-bearing subsequence, as (tweet index, stance) in timeline order.
    // In strict mode Neutral tweets stay in the sequence as run breakers.
    std::vector<std::pair<std::size_t, Stance>> seq;
    for (std::size_t idx : timeline) {
        Stance s = stances[idx];
        if (s != Stance::Neutral || strict) {
            seq.emplace_back(idx, s);
        }
    }

    // Route (a): maximal same-stance runs with >= k distinct texts.
    std::size_t i = 0;
    while (i < seq.size()) {
        if (seq[i].second == Stance::Neutral) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < seq.size() && seq[j].second == seq[i].second) {
            ++j;
        }
        std::unordered_set<std::string> distinct;
        for (std::size_t m = i; m < j; ++m) {
            distinct.insert(corpus.tweets()[seq[m].first].text);
        }
        if (distinct.size() >= static_cast<std::size_t>(k)) {
            for (std::size_t m = i; m < j; ++m) {
                flagged.push_back(seq[m].first);
            }
        }
        i = j;
    }

    // Route (b): per-tweet sentence rule.
    for (std::size_t idx : timeline) {
        if (confirmation_by_sentences(corpus.tweets()[idx].text, sentence_stance)) {
            flagged.push_back(idx);
        }
    }

    std::sort(flagged.begin(), flagged.end());
    flagged.erase(std::unique(flagged.begin(), flagged.end()), flagged.end());
    return flagged;
}

std::vector<std::size_t> detect_confirmation(const Corpus& corpus,
                                             const std::vector<std::size_t>& timeline,
                                             int k, const StanceFn& stance, bool strict) {
    std::vector<Stance> stances(corpus.tweets().size(), Stance::Neutral);
    for (std::size_t idx : timeline) {
        stances[idx] = stance(corpus.tweets()[idx].text);
    }
    return detect_confirmation_cached(corpus, timeline, k, stances, stance, strict);
}

DetectionResult assemble_trigger_vectors(const Corpus& corpus, const Lexicon& lexicon,
                                         const ThresholdConfig& thresholds,
                                         const StanceFn& stance,
                                         const std::vector<bool>* dissonance,
                                         const EmbeddingProvider& provider, int jobs,
                                         const std::vector<Stance>* stances) {
    thresholds.validate();
    const auto& tweets = corpus.tweets();
    std::vector<TriggerFlags> flags(tweets.size());
    std::atomic<std::size_t> source_misses{0};

    std::vector<Stance> local_stances;
    if (!stances) {
        local_stances = compute_tweet_stances(corpus, stance, jobs);
        stances = &local_stances;
    }
    if (stances->size() != tweets.size()) {
        throw InvariantError("stance cache size mismatch");
    }

    // Per-tweet rules, chunked over tweets.
    parallel_chunks(tweets.size(), jobs, 2048, [&](std::size_t begin, std::size_t end) {
        std::size_t local_misses = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const TweetRecord& t = tweets[i];
            auto tokens = tokenize(t.text);
            TriggerFlags& f = flags[i];
            f.affect = detect_affect(tokens, lexicon, thresholds.k_affect);
            f.negativity = detect_negativity(tokens, lexicon, thresholds.k_negativity);
            f.authority = detect_authority(t, corpus, lexicon);
            f.homophily = detect_homophily(t, corpus, &local_misses);
        }
        source_misses.fetch_add(local_misses);
    });

    // Per-user rules, chunked over users. Each user's flags land in
    // disjoint tweet slots, so this stays deterministic under any jobs.
    const auto& users = corpus.user_ids();
    parallel_chunks(users.size(), jobs, 64, [&](std::size_t begin, std::size_t end) {
        for (std::size_t u = begin; u < end; ++u) {
            const auto& timeline = corpus.timeline(users[u]);
            if (timeline.empty()) {
                continue;
            }
            for (std::size_t idx :
                 detect_availability(corpus, timeline, thresholds.k_availability)) {
                flags[idx].availability = true;
            }
            for (std::size_t idx :
                 detect_illusory_truth(corpus, timeline, thresholds.k_illusory,
                                       thresholds.similarity, provider)) {
                flags[idx].illusory_truth = true;
            }
            for (std::size_t idx :
                 detect_confirmation_cached(corpus, timeline, thresholds.k_confirmation,
                                            *stances, stance,
                                            thresholds.confirmation_strict)) {
                flags[idx].confirmation = true;
            }
        }
    });

    if (dissonance) {
        if (dissonance->size() != tweets.size()) {
            throw InvariantError("dissonance flag vector size mismatch");
        }
        for (std::size_t i = 0; i < tweets.size(); ++i) {
            flags[i].cognitive_dissonance = (*dissonance)[i];
        }
    }

    DetectionResult out;
    out.homophily_source_misses = source_misses.load();
    out.vectors.reserve(tweets.size());
    for (std::size_t i : corpus.by_tweet_id_order()) {
        out.vectors.push_back({tweets[i].tweet_id, flags[i]});
    }
    return out;
}

}  // namespace biaslens
