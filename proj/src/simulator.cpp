#include "biaslens/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "biaslens/analytics.hpp"
#include "biaslens/errors.hpp"
#include "biaslens/parallel.hpp"
#include "biaslens/rng.hpp"
#include "biaslens/similarity.hpp"

namespace biaslens {

namespace {

constexpr std::size_t kDissIdx = static_cast<std::size_t>(Construct::CognitiveDissonance);

// Scaffolding word banks. Their sizes are pairwise coprime primes so that
// counter-driven selection makes any two generated texts of the same kind
// differ in at least two bank slots (a single shared slot requires the
// counters to agree modulo three of the bank sizes, i.e. differ by over
// 150, more than any timeline is long). That keeps hashed-ngram cosine
// between same-kind texts well below any usable similarity threshold, so
// fillers can never form an accidental near-duplicate cluster.
const std::array<const char*, 13> kSubjects = {
    "gardener", "plumber", "violinist", "sailor",  "barista",   "clockmaker", "tailor",
    "shepherd", "glazier", "carpenter", "beekeeper", "typist",   "drummer"};
const std::array<const char*, 11> kVerbs = {
    "polishes", "stacks", "measures", "repairs", "folds", "sketches",
    "waters",   "tunes",  "sorts",    "sweeps",  "carries"};
const std::array<const char*, 7> kObjects = {
    "ladder", "kettle", "bicycle", "lantern", "bookshelf", "wheelbarrow", "telescope"};
const std::array<const char*, 5> kManners = {"slowly", "twice", "outdoors", "neatly", "daily"};

const std::array<const char*, 13> kNounsA = {
    "ledger", "bassoon", "pantry", "harbor", "mosaic",  "pulley", "thimble",
    "quarry", "bobbin",  "trellis", "gazebo", "flume",  "easel"};
const std::array<const char*, 11> kNounsB = {
    "copper", "walnut", "granite", "velvet", "burlap", "pewter",
    "maroon", "indigo", "umber",   "cobalt", "sepia"};
const std::array<const char*, 7> kNounsC = {
    "bridge", "tunnel", "meadow", "valley", "summit", "ridge", "delta"};

const std::array<const char*, 4> kMisc = {"the", "field", "note", "indeed"};

std::string pad_num(std::int64_t v, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*lld", width, static_cast<long long>(v));
    return buf;
}

std::string join_tokens(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ' ';
        out += parts[i];
    }
    return out;
}

// Lexicon terms usable inside generated text. A term is admitted only if
// it contributes no counts to the listed foreign categories, so a planted
// tweet never picks up an unplanned flag (e.g. a negative term that were
// also a stance phrase would give affect plants a stance).
struct TermPools {
    std::vector<std::string> emotion, negative, authority, affiliation, pro, anti;
};

TermPools build_pools(const Lexicon& lex) {
    auto clean_for = [&](const std::string& term, std::initializer_list<LexCategory> banned) {
        auto toks = tokenize(term);
        if (toks.empty()) return false;
        for (LexCategory c : banned) {
            if (lex.count_category(toks, c) != 0) return false;
        }
        return true;
    };
    TermPools p;
    for (const auto& t : lex.terms(LexCategory::Emotion)) {
        if (clean_for(t, {LexCategory::Affiliation, LexCategory::Authority,
                          LexCategory::StancePro, LexCategory::StanceAnti})) {
            p.emotion.push_back(t);
        }
    }
    for (const auto& t : lex.terms(LexCategory::Negative)) {
        if (clean_for(t, {LexCategory::Affiliation, LexCategory::Authority,
                          LexCategory::StancePro, LexCategory::StanceAnti})) {
            p.negative.push_back(t);
        }
    }
    for (const auto& t : lex.terms(LexCategory::Authority)) {
        if (clean_for(t, {LexCategory::Affiliation, LexCategory::Emotion, LexCategory::Negative,
                          LexCategory::StancePro, LexCategory::StanceAnti})) {
            p.authority.push_back(t);
        }
    }
    for (const auto& t : lex.terms(LexCategory::Affiliation)) {
        if (clean_for(t, {LexCategory::Authority})) {
            p.affiliation.push_back(t);
        }
    }
    // A usable stance term must be unambiguous: "do not vaccinate" carries
    // a pro term inside it, so a sentence built from it ties to Neutral.
    for (const auto& t : lex.terms(LexCategory::StancePro)) {
        if (clean_for(t, {LexCategory::Affiliation, LexCategory::Authority, LexCategory::Emotion,
                          LexCategory::Negative, LexCategory::StanceAnti})) {
            p.pro.push_back(t);
        }
    }
    for (const auto& t : lex.terms(LexCategory::StanceAnti)) {
        if (clean_for(t, {LexCategory::Affiliation, LexCategory::Authority, LexCategory::Emotion,
                          LexCategory::Negative, LexCategory::StancePro})) {
            p.anti.push_back(t);
        }
    }
    return p;
}

void check_scaffolding(const Lexicon& lex) {
    std::vector<std::string> words;
    for (auto w : kSubjects) words.push_back(w);
    for (auto w : kVerbs) words.push_back(w);
    for (auto w : kObjects) words.push_back(w);
    for (auto w : kManners) words.push_back(w);
    for (auto w : kNounsA) words.push_back(w);
    for (auto w : kNounsB) words.push_back(w);
    for (auto w : kNounsC) words.push_back(w);
    for (auto w : kMisc) words.push_back(w);
    for (const auto& w : words) {
        auto toks = tokenize(w);
        for (LexCategory c :
             {LexCategory::Affiliation, LexCategory::Authority, LexCategory::Emotion,
              LexCategory::Negative, LexCategory::StancePro, LexCategory::StanceAnti}) {
            if (lex.count_category(toks, c) != 0) {
                throw ConfigError("lexicon category '" + std::string(lex_category_file(c)) +
                                  "' contains generator scaffolding word '" + w +
                                  "'; pick terms that do not collide");
            }
        }
    }
}

enum class UnitKind {
    Filler,
    FillerShare,
    Homophily,
    Authority,
    Affect,
    ConfB,
    ConfABlock,
    AvailBlock,
    IllusoryBlock
};

struct Unit {
    UnitKind kind = UnitKind::Filler;
    int size = 1;
};

std::optional<Construct> base_construct(UnitKind kind) {
    switch (kind) {
        case UnitKind::Homophily: return Construct::Homophily;
        case UnitKind::Authority: return Construct::Authority;
        case UnitKind::Affect: return Construct::AffectNegativity;
        case UnitKind::ConfB:
        case UnitKind::ConfABlock: return Construct::Confirmation;
        case UnitKind::AvailBlock: return Construct::Availability;
        case UnitKind::IllusoryBlock: return Construct::IllusoryTruth;
        default: return std::nullopt;
    }
}

// Which boost targets a unit of this kind can absorb. Validation already
// rejects impossible pairs; this guards the remaining per-kind cases.
bool boost_compatible(UnitKind kind, Construct second) {
    if (second == Construct::Availability || second == Construct::IllusoryTruth ||
        second == Construct::CognitiveDissonance) {
        return false;
    }
    if (kind == UnitKind::IllusoryBlock) {
        // Members must stay originals and stance-free.
        return second == Construct::Authority || second == Construct::AffectNegativity;
    }
    return true;
}

struct UserBundle {
    UserProfile profile;
    std::vector<TweetRecord> own;         // timeline order
    std::vector<TriggerFlags> own_flags;  // parallel to own
    std::vector<UserProfile> side_profiles;
    std::vector<TweetRecord> side_tweets;
};

struct PlannedTweet {
    std::string text;
    std::optional<std::string> retweeted, quoted, replied;
    TriggerFlags flags;
};

struct TextSpec {
    bool authority = false;
    bool affect = false;
    bool two_sentences = false;
    std::optional<Stance> stance;
};

class UserGenerator {
  public:
    UserGenerator(const SimulationConfig& cfg, const Lexicon& lex, const TermPools& pools,
                  const EmbeddingProvider& provider, std::int64_t ord)
        : cfg_(cfg),
          lex_(lex),
          pools_(pools),
          provider_(provider),
          ord_(ord),
          rng_(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(ord))),
          base_ts_(1600000000 + ord * 10000) {}

    UserBundle run() {
        bool is_bot = ord_ < cfg_.n_bots;
        out_.profile.user_id =
            is_bot ? "b" + pad_num(ord_, 6) : "h" + pad_num(ord_ - cfg_.n_bots, 6);
        out_.profile.bio =
            pools_.affiliation[static_cast<std::size_t>(ord_) % pools_.affiliation.size()];
        out_.profile.bot_score = is_bot ? cfg_.bot_score_bot : cfg_.bot_score_human;
        const auto& p = is_bot ? cfg_.prevalence_bot : cfg_.prevalence_human;

        std::int64_t span = cfg_.tweets_max - cfg_.tweets_min + 1;
        std::int64_t L =
            cfg_.tweets_min + static_cast<std::int64_t>(rng_.uniform_int(
                                  static_cast<std::uint64_t>(span)));
        std::int64_t d = cfg_.dissonance_conforming;
        bool dissonant = false;
        if (p[kDissIdx] > 0.0 && L >= d + 3) {
            double q = std::min(1.0, p[kDissIdx] * static_cast<double>(L) /
                                         static_cast<double>(d));
            dissonant = rng_.bernoulli(q);
        }

        std::vector<Unit> units = plan_units(p, L, dissonant ? d + 2 : 0);
        std::vector<PlannedTweet> slots(static_cast<std::size_t>(L));
        std::size_t cursor = 0;
        std::string choir_id;
        if (dissonant) {
            choir_id = make_choir();
            slots[0].text = filler_text();
            slots[0].replied = choir_id;
            cursor = 1;
        }
        for (const Unit& u : units) {
            lay_unit(u, slots, cursor, dissonant);
            cursor += static_cast<std::size_t>(u.size);
        }
        if (dissonant) {
            lay_dissonance_tail(slots, static_cast<std::size_t>(L), static_cast<std::size_t>(d));
        }

        finalize(slots);
        verify(static_cast<std::size_t>(L), dissonant, static_cast<std::size_t>(d), slots);
        return std::move(out_);
    }

  private:
    std::vector<Unit> plan_units(const std::array<double, kConstructCount>& p, std::int64_t L,
                                 std::int64_t reserved) {
        auto stoch_round = [&](double x) {
            double f = std::floor(x);
            return static_cast<std::int64_t>(f) + (rng_.bernoulli(x - f) ? 1 : 0);
        };
        const double len = static_cast<double>(L);
        int k_av = cfg_.thresholds.k_availability;
        int k_ill = cfg_.thresholds.k_illusory;
        int k_conf = cfg_.thresholds.k_confirmation;
        std::vector<Unit> units;
        auto add = [&](UnitKind kind, std::int64_t count, int size) {
            for (std::int64_t i = 0; i < count; ++i) units.push_back({kind, size});
        };
        add(UnitKind::AvailBlock,
            stoch_round(p[static_cast<std::size_t>(Construct::Availability)] * len / k_av), k_av);
        add(UnitKind::IllusoryBlock,
            stoch_round(p[static_cast<std::size_t>(Construct::IllusoryTruth)] * len / k_ill),
            k_ill);
        double p_conf = p[static_cast<std::size_t>(Construct::Confirmation)];
        add(UnitKind::ConfABlock, stoch_round(0.5 * p_conf * len / k_conf), k_conf);
        add(UnitKind::ConfB, stoch_round(0.5 * p_conf * len), 1);
        add(UnitKind::Homophily,
            stoch_round(p[static_cast<std::size_t>(Construct::Homophily)] * len), 1);
        add(UnitKind::Authority,
            stoch_round(p[static_cast<std::size_t>(Construct::Authority)] * len), 1);
        add(UnitKind::Affect,
            stoch_round(p[static_cast<std::size_t>(Construct::AffectNegativity)] * len), 1);

        shuffle(units);
        std::int64_t capacity = L - reserved;
        std::vector<Unit> kept;
        std::int64_t used = 0;
        for (const Unit& u : units) {
            if (used + u.size <= capacity) {
                kept.push_back(u);
                used += u.size;
            }
        }
        while (used < capacity) {
            bool share = rng_.bernoulli(cfg_.filler_share_probability);
            kept.push_back({share ? UnitKind::FillerShare : UnitKind::Filler, 1});
            ++used;
        }
        shuffle(kept);
        return kept;
    }

    void shuffle(std::vector<Unit>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[rng_.uniform_int(i)]);
        }
    }

    // --- text building -----------------------------------------------------

    std::string unique_token() {
        return "z" + std::to_string(ord_) + "y" + std::to_string(unique_counter_++) + "qv";
    }

    std::string stance_term(Stance s, std::size_t c) {
        const auto& pool = s == Stance::Pro ? pools_.pro : pools_.anti;
        return pool[c % pool.size()];
    }

    std::vector<std::string> sentence_tokens(const TextSpec& spec) {
        std::size_t c = static_cast<std::size_t>(word_counter_++);
        std::vector<std::string> parts;
        if (spec.stance) parts.push_back(stance_term(*spec.stance, c));
        if (spec.authority) parts.push_back(pools_.authority[c % pools_.authority.size()]);
        if (spec.affect) {
            for (int i = 0; i < cfg_.thresholds.k_affect; ++i) {
                parts.push_back(pools_.emotion[(c + i) % pools_.emotion.size()]);
            }
            for (int i = 0; i < cfg_.thresholds.k_negativity; ++i) {
                parts.push_back(pools_.negative[(c + i) % pools_.negative.size()]);
            }
        }
        parts.push_back(kNounsA[c % kNounsA.size()]);
        parts.push_back(kNounsB[c % kNounsB.size()]);
        parts.push_back(kNounsC[c % kNounsC.size()]);
        parts.push_back(unique_token());
        return parts;
    }

    std::string compose_text(const TextSpec& spec) {
        std::string text = join_tokens(sentence_tokens(spec));
        if (spec.two_sentences) {
            // Second distinct sentence of the same stance: confirmation
            // within a single post.
            TextSpec tail;
            tail.stance = spec.stance;
            text += ". " + join_tokens(sentence_tokens(tail)) + ".";
        }
        return text;
    }

    std::string filler_text() {
        std::size_t c = static_cast<std::size_t>(word_counter_++);
        std::string out = "the ";
        out += kSubjects[c % kSubjects.size()];
        out += ' ';
        out += kVerbs[c % kVerbs.size()];
        out += " the ";
        out += kObjects[c % kObjects.size()];
        out += ' ';
        out += kManners[c % kManners.size()];
        out += ' ';
        out += unique_token();
        return out;
    }

    // --- side accounts ------------------------------------------------------

    // One fresh single-tweet account per requested source. Timeline length
    // one makes them structurally immune to every per-user rule.
    const TweetRecord& request_wellspring(bool affiliated) {
        std::int64_t j = source_counter_++;
        UserProfile p;
        p.user_id = "w" + pad_num(ord_, 6) + "_" + pad_num(j, 3);
        if (affiliated) p.bio = out_.profile.bio;
        TweetRecord t;
        t.tweet_id = "s" + pad_num(ord_, 6) + "_" + pad_num(j, 3);
        t.author_id = p.user_id;
        t.timestamp = base_ts_ - 500 + j;
        t.text = "field note " + unique_token();
        out_.side_profiles.push_back(std::move(p));
        out_.side_tweets.push_back(std::move(t));
        return out_.side_tweets.back();
    }

    std::string make_choir() {
        std::size_t c = static_cast<std::size_t>(word_counter_++);
        UserProfile p;
        p.user_id = "q" + pad_num(ord_, 6);
        TweetRecord t;
        t.tweet_id = "s" + pad_num(ord_, 6) + "_q";
        t.author_id = p.user_id;
        t.timestamp = base_ts_ - 600;
        t.text = stance_term(Stance::Pro, c) + " indeed";
        out_.side_profiles.push_back(std::move(p));
        out_.side_tweets.push_back(t);
        return t.tweet_id;
    }

    // --- unit layout --------------------------------------------------------

    std::set<Construct> roll_boosts(Construct base, UnitKind kind) {
        std::set<Construct> extras;
        for (const auto& b : cfg_.boosts) {
            if (b.first != base || b.second == base || extras.count(b.second)) continue;
            if (kind != UnitKind::Filler && !boost_compatible(kind, b.second)) continue;
            if (rng_.bernoulli(b.probability)) extras.insert(b.second);
        }
        return extras;
    }

    static void apply_flags(TriggerFlags& f, Construct c) {
        switch (c) {
            case Construct::Homophily: f.homophily = true; break;
            case Construct::Authority: f.authority = true; break;
            case Construct::Availability: f.availability = true; break;
            case Construct::IllusoryTruth: f.illusory_truth = true; break;
            case Construct::AffectNegativity:
                f.affect = true;
                f.negativity = true;
                break;
            case Construct::CognitiveDissonance: f.cognitive_dissonance = true; break;
            case Construct::Confirmation: f.confirmation = true; break;
        }
    }

    void lay_unit(const Unit& u, std::vector<PlannedTweet>& slots, std::size_t at,
                  bool dissonant) {
        if (u.kind == UnitKind::Filler) {
            slots[at].text = filler_text();
            return;
        }
        if (u.kind == UnitKind::FillerShare) {
            const TweetRecord& src = request_wellspring(false);
            slots[at].retweeted = src.tweet_id;
            slots[at].text = src.text;
            return;
        }
        Construct base = *base_construct(u.kind);
        std::set<Construct> extras = roll_boosts(base, u.kind);
        bool wants_stance = u.kind == UnitKind::ConfB || u.kind == UnitKind::ConfABlock ||
                            extras.count(Construct::Confirmation) != 0;
        // A dissonant user's pre-divergence stance plants must all carry the
        // to-be-majority stance, or they would act as early divergers and
        // drag unplanned dissonance flags onto later tweets.
        Stance st = Stance::Pro;
        if (wants_stance && !dissonant) st = rng_.bernoulli(0.5) ? Stance::Pro : Stance::Anti;

        TriggerFlags flags;
        apply_flags(flags, base);
        for (Construct c : extras) apply_flags(flags, c);

        bool has_auth = u.kind == UnitKind::Authority || extras.count(Construct::Authority);
        bool has_aff = u.kind == UnitKind::Affect || extras.count(Construct::AffectNegativity);
        bool conf_b = u.kind == UnitKind::ConfB || extras.count(Construct::Confirmation) != 0;
        bool homophilous = u.kind == UnitKind::Homophily || extras.count(Construct::Homophily);

        switch (u.kind) {
            case UnitKind::Homophily:
            case UnitKind::Authority:
            case UnitKind::Affect:
            case UnitKind::ConfB: {
                TextSpec spec;
                spec.authority = has_auth;
                spec.affect = has_aff;
                spec.two_sentences = conf_b;
                if (wants_stance) spec.stance = st;
                PlannedTweet& pt = slots[at];
                pt.flags = flags;
                if (u.kind == UnitKind::Homophily && extras.empty()) {
                    const TweetRecord& src = request_wellspring(true);
                    pt.retweeted = src.tweet_id;
                    pt.text = src.text;
                } else if (homophilous) {
                    const TweetRecord& src = request_wellspring(true);
                    pt.quoted = src.tweet_id;
                    pt.text = compose_text(spec);
                } else {
                    pt.text = compose_text(spec);
                }
                break;
            }
            case UnitKind::ConfABlock: {
                // >= k consecutive same-stance posts with distinct texts.
                for (int m = 0; m < u.size; ++m) {
                    TextSpec spec;
                    spec.stance = st;
                    spec.authority = has_auth;
                    spec.affect = has_aff;
                    PlannedTweet& pt = slots[at + static_cast<std::size_t>(m)];
                    pt.flags = flags;
                    if (homophilous) {
                        const TweetRecord& src = request_wellspring(true);
                        pt.quoted = src.tweet_id;
                    }
                    pt.text = compose_text(spec);
                }
                break;
            }
            case UnitKind::AvailBlock: {
                // k shares of one source by the same user.
                const TweetRecord& src = request_wellspring(homophilous);
                std::string src_id = src.tweet_id;
                std::string src_text = src.text;
                bool custom = has_auth || has_aff || conf_b;
                std::string text;
                if (custom) {
                    TextSpec spec;
                    spec.authority = has_auth;
                    spec.affect = has_aff;
                    spec.two_sentences = conf_b;
                    if (wants_stance) spec.stance = st;
                    text = compose_text(spec);
                }
                for (int m = 0; m < u.size; ++m) {
                    PlannedTweet& pt = slots[at + static_cast<std::size_t>(m)];
                    pt.flags = flags;
                    if (custom) {
                        pt.quoted = src_id;
                        pt.text = text;
                    } else {
                        pt.retweeted = src_id;
                        pt.text = src_text;
                    }
                }
                break;
            }
            case UnitKind::IllusoryBlock:
                lay_illusory_block(u, slots, at, flags, has_auth, has_aff);
                break;
            default: break;
        }
    }

    void lay_illusory_block(const Unit& u, std::vector<PlannedTweet>& slots, std::size_t at,
                            const TriggerFlags& flags, bool has_auth, bool has_aff) {
        std::size_t c = static_cast<std::size_t>(word_counter_++);
        std::int64_t blk = ill_block_counter_++;
        std::vector<std::string> terms;
        if (has_auth) terms.push_back(pools_.authority[c % pools_.authority.size()]);
        if (has_aff) {
            for (int i = 0; i < cfg_.thresholds.k_affect; ++i) {
                terms.push_back(pools_.emotion[(c + i) % pools_.emotion.size()]);
            }
            for (int i = 0; i < cfg_.thresholds.k_negativity; ++i) {
                terms.push_back(pools_.negative[(c + i) % pools_.negative.size()]);
            }
        }
        // Paraphrase family: a shared core plus a one-token tail per member.
        // The core is grown until every member clears the similarity
        // threshold against the first member (the cluster leader) with a
        // small margin.
        std::string prefix = "cr" + std::to_string(ord_) + "b" + std::to_string(blk) + "w";
        double needed = cfg_.thresholds.similarity + 0.02;
        for (int core_len = 16;; core_len += 6) {
            if (core_len > 96) {
                throw ConfigError(
                    "cannot reach the similarity threshold with paraphrase planting; "
                    "lower thresholds.similarity");
            }
            std::vector<std::string> core = terms;
            for (int t = 0; t < core_len; ++t) core.push_back(prefix + std::to_string(t));
            std::string base_text = join_tokens(core);
            std::vector<std::string> texts;
            for (int m = 0; m < u.size; ++m) {
                texts.push_back(base_text + " tl" + std::to_string(ord_) + "b" +
                                std::to_string(blk) + "m" + std::to_string(m));
            }
            auto lead = provider_.embed(texts[0]);
            bool ok = true;
            for (int m = 1; m < u.size && ok; ++m) {
                ok = cosine(lead, provider_.embed(texts[static_cast<std::size_t>(m)])) >= needed;
            }
            if (!ok) continue;
            for (int m = 0; m < u.size; ++m) {
                PlannedTweet& pt = slots[at + static_cast<std::size_t>(m)];
                pt.flags = flags;
                pt.text = texts[static_cast<std::size_t>(m)];
            }
            return;
        }
    }

    void lay_dissonance_tail(std::vector<PlannedTweet>& slots, std::size_t L, std::size_t d) {
        // Divergent post: the one stance against the network majority.
        TextSpec div;
        div.stance = Stance::Anti;
        slots[L - d - 1].text = compose_text(div);

        std::set<Construct> extras = roll_boosts(Construct::CognitiveDissonance, UnitKind::Filler);
        TriggerFlags flags;
        flags.cognitive_dissonance = true;
        for (Construct c : extras) apply_flags(flags, c);

        TextSpec spec;
        spec.stance = Stance::Pro;
        spec.authority = extras.count(Construct::Authority) != 0;
        spec.affect = extras.count(Construct::AffectNegativity) != 0;
        spec.two_sentences = extras.count(Construct::Confirmation) != 0;
        // One text reused verbatim: repeated conforming posts stay a single
        // distinct text, so they can neither form a confirmation run nor an
        // illusory-truth cluster of their own.
        std::string text = compose_text(spec);
        bool avail = extras.count(Construct::Availability) != 0;
        bool affiliated = extras.count(Construct::Homophily) != 0;
        std::string shared_src;
        if (avail) shared_src = request_wellspring(affiliated).tweet_id;
        for (std::size_t m = 0; m < d; ++m) {
            PlannedTweet& pt = slots[L - d + m];
            pt.flags = flags;
            pt.text = text;
            if (avail) {
                pt.quoted = shared_src;
            } else if (affiliated) {
                pt.quoted = request_wellspring(true).tweet_id;
            }
        }
    }

    // --- finalize -----------------------------------------------------------

    std::int64_t draw_count(const EngagementModel& m, const TriggerFlags& f) {
        double z = m.alpha[0];
        for (std::size_t c = 0; c < kConstructCount; ++c) {
            if (f.construct_flag(static_cast<Construct>(c))) z += m.alpha[c + 1];
        }
        z += m.sigma * rng_.gaussian();
        double v = std::exp(z) - 1.0;
        if (v <= 0.0) return 0;
        if (v >= 9.0e15) return 9000000000000000LL;
        return std::llround(v);
    }

    void apply_engagement(TweetRecord& t, const TriggerFlags& f) {
        for (const char* metric : kEngagementMetrics) {
            auto it = cfg_.engagement.find(metric);
            if (it == cfg_.engagement.end()) continue;
            std::int64_t v = draw_count(it->second, f);
            std::string name = metric;
            if (name == "favorites") t.favorites = v;
            else if (name == "retweets") t.retweets = v;
            else if (name == "replies") t.replies = v;
            else t.quotes = v;
        }
    }

    void finalize(std::vector<PlannedTweet>& slots) {
        TriggerFlags clean;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            TweetRecord t;
            t.tweet_id = "t" + pad_num(ord_, 6) + "_" + pad_num(static_cast<std::int64_t>(i), 3);
            t.author_id = out_.profile.user_id;
            t.timestamp = base_ts_ + static_cast<std::int64_t>(i) * 60;
            t.text = slots[i].text;
            t.retweeted_tweet_id = slots[i].retweeted;
            t.quoted_tweet_id = slots[i].quoted;
            t.replied_to_tweet_id = slots[i].replied;
            apply_engagement(t, slots[i].flags);
            out_.own.push_back(std::move(t));
            out_.own_flags.push_back(slots[i].flags);
        }
        for (auto& t : out_.side_tweets) apply_engagement(t, clean);
    }

    // Runs the real detection rules over the finished timeline and demands
    // they reproduce the plan exactly: planted instances must be flagged
    // and every other tweet must come out clean.
    void verify(std::size_t L, bool dissonant, std::size_t d,
                const std::vector<PlannedTweet>& slots) {
        std::vector<TweetRecord> tweets = out_.own;
        tweets.insert(tweets.end(), out_.side_tweets.begin(), out_.side_tweets.end());
        std::vector<UserProfile> profiles;
        profiles.push_back(out_.profile);
        profiles.insert(profiles.end(), out_.side_profiles.begin(), out_.side_profiles.end());
        Corpus mini(std::move(tweets), std::move(profiles));
        mini.annotate_profiles(lex_);
        const auto& tl = mini.timeline(out_.profile.user_id);
        if (tl.size() != L) {
            throw InvariantError("generator timeline size mismatch");
        }

        std::vector<TriggerFlags> actual(L);
        std::size_t misses = 0;
        for (std::size_t pos = 0; pos < tl.size(); ++pos) {
            const TweetRecord& t = mini.tweets()[tl[pos]];
            auto toks = tokenize(t.text);
            actual[pos].affect = detect_affect(toks, lex_, cfg_.thresholds.k_affect);
            actual[pos].negativity = detect_negativity(toks, lex_, cfg_.thresholds.k_negativity);
            actual[pos].authority = detect_authority(t, mini, lex_);
            actual[pos].homophily = detect_homophily(t, mini, &misses);
        }
        StanceFn stance = [this](const std::string& text) { return stance_of(text, lex_); };
        for (std::size_t i :
             detect_availability(mini, tl, cfg_.thresholds.k_availability)) {
            actual[index_in(tl, i)].availability = true;
        }
        for (std::size_t i :
             detect_illusory_truth(mini, tl, cfg_.thresholds.k_illusory,
                                   cfg_.thresholds.similarity, provider_)) {
            actual[index_in(tl, i)].illusory_truth = true;
        }
        for (std::size_t i :
             detect_confirmation(mini, tl, cfg_.thresholds.k_confirmation, stance,
                                 cfg_.thresholds.confirmation_strict)) {
            actual[index_in(tl, i)].confirmation = true;
        }
        if (misses != 0) {
            throw InvariantError("generator produced a share with a missing source");
        }

        for (std::size_t i = 0; i < L; ++i) {
            const TriggerFlags& want = slots[i].flags;
            const TriggerFlags& got = actual[i];
            auto complain = [&](const char* what, bool w, bool g) {
                if (w == g) return;
                throw ConfigError("planting verification failed for " + out_.own[i].tweet_id +
                                  ": " + what + " planned=" + (w ? "1" : "0") + " detected=" +
                                  (g ? "1" : "0") + " text=\"" + out_.own[i].text +
                                  "\" (a lexicon term likely collides with generator "
                                  "scaffolding)");
            };
            complain("homophily", want.homophily, got.homophily);
            complain("authority", want.authority, got.authority);
            complain("availability", want.availability, got.availability);
            complain("illusory_truth", want.illusory_truth, got.illusory_truth);
            complain("affect", want.affect, got.affect);
            complain("negativity", want.negativity, got.negativity);
            complain("confirmation", want.confirmation, got.confirmation);
        }
        if (dissonant) {
            StanceFn sf = stance;
            for (std::size_t i = 0; i < L; ++i) {
                Stance s = sf(out_.own[i].text);
                bool divergent_slot = i == L - d - 1;
                bool conforming_slot = i >= L - d;
                if (divergent_slot && s != Stance::Anti) {
                    throw InvariantError("divergent post lost its stance");
                }
                if (conforming_slot && s != Stance::Pro) {
                    throw InvariantError("conforming post lost its stance");
                }
                if (!divergent_slot && !conforming_slot && s == Stance::Anti) {
                    throw InvariantError("unplanned divergent stance before the shift");
                }
            }
        }
    }

    // Own tweets are the first block of the mini corpus, so a corpus index
    // below L is also the timeline position... not in general: map via the
    // tweet id suffix instead.
    std::size_t index_in(const std::vector<std::size_t>& tl, std::size_t corpus_index) {
        auto it = std::find(tl.begin(), tl.end(), corpus_index);
        if (it == tl.end()) {
            throw InvariantError("detector flagged a tweet outside the timeline");
        }
        return static_cast<std::size_t>(it - tl.begin());
    }

    const SimulationConfig& cfg_;
    const Lexicon& lex_;
    const TermPools& pools_;
    const EmbeddingProvider& provider_;
    std::int64_t ord_;
    SplitMix64 rng_;
    std::int64_t base_ts_;
    int unique_counter_ = 0;
    int word_counter_ = 0;
    std::int64_t source_counter_ = 0;
    std::int64_t ill_block_counter_ = 0;
    UserBundle out_;
};

}  // namespace

void SimulationConfig::validate() const {
    thresholds.validate();
    if (n_bots < 0 || n_humans < 0) throw ConfigError("cohort sizes must be non-negative");
    if (n_bots + n_humans < 1) throw ConfigError("at least one account is required");
    if (tweets_min < 1 || tweets_max < tweets_min) {
        throw ConfigError("tweets_per_user range is invalid");
    }
    if (tweets_max > 150) {
        throw ConfigError("tweets_per_user max is 150");
    }
    if (thresholds.k_availability < 2 || thresholds.k_illusory < 2 ||
        thresholds.k_confirmation < 2) {
        throw ConfigError("repetition thresholds below 2 make single posts ambiguous; "
                          "planting needs availability/illusory/confirmation k >= 2");
    }
    if (dissonance_conforming < 1) {
        throw ConfigError("dissonance_conforming must be at least 1");
    }
    bool any_dissonance = false;
    for (const auto* p : {&prevalence_bot, &prevalence_human}) {
        double sum = 0.0;
        for (double v : *p) {
            if (v < 0.0 || v > 1.0) throw ConfigError("prevalence values must be in [0,1]");
            sum += v;
        }
        if (sum > 0.75) {
            throw ConfigError("planted prevalences sum above 0.75; the timeline needs room "
                              "for clean posts");
        }
        if ((*p)[kDissIdx] > 0.0) any_dissonance = true;
    }
    if (any_dissonance && tweets_min < dissonance_conforming + 3) {
        throw ConfigError("dissonance planting needs tweets_per_user min >= conforming + 3");
    }
    std::int64_t reserve = any_dissonance ? dissonance_conforming + 2 : 0;
    auto used = [&](Construct c) {
        std::size_t i = static_cast<std::size_t>(c);
        return prevalence_bot[i] > 0.0 || prevalence_human[i] > 0.0;
    };
    int largest_block = 0;
    if (used(Construct::Availability)) largest_block = std::max(largest_block, thresholds.k_availability);
    if (used(Construct::IllusoryTruth)) largest_block = std::max(largest_block, thresholds.k_illusory);
    if (used(Construct::Confirmation)) largest_block = std::max(largest_block, thresholds.k_confirmation);
    if (largest_block > 0 && tweets_min - reserve < largest_block) {
        throw ConfigError("tweets_per_user min cannot fit the largest planted block");
    }
    if (used(Construct::IllusoryTruth) && thresholds.similarity > 0.95) {
        throw ConfigError("similarity above 0.95 leaves no room between paraphrase and "
                          "duplicate; lower it or disable illusory planting");
    }
    for (const auto& b : boosts) {
        if (b.probability < 0.0 || b.probability > 1.0) {
            throw ConfigError("boost probability must be in [0,1]");
        }
        if (b.first == b.second) throw ConfigError("boost pairs must differ");
        if (b.second == Construct::CognitiveDissonance) {
            throw ConfigError("cognitive dissonance is user-level and cannot be added "
                              "to a single post");
        }
        if (b.second == Construct::IllusoryTruth) {
            throw ConfigError("illusory truth needs a whole paraphrase block and cannot "
                              "be added to an existing post");
        }
        if (b.second == Construct::Availability) {
            if (b.first != Construct::CognitiveDissonance) {
                throw ConfigError("availability needs a whole share block and can only be "
                                  "combined with cognitive dissonance");
            }
            if (dissonance_conforming < thresholds.k_availability) {
                throw ConfigError("dissonance+availability needs dissonance_conforming >= "
                                  "the availability threshold");
            }
        }
        if (b.first == Construct::IllusoryTruth &&
            (b.second == Construct::Homophily || b.second == Construct::Confirmation)) {
            throw ConfigError("illusory members must stay stance-free originals; this "
                              "boost pair is impossible");
        }
    }
    if (bot_score_bot < 0.0 || bot_score_bot > 1.0 || bot_score_human < 0.0 ||
        bot_score_human > 1.0) {
        throw ConfigError("bot scores must be in [0,1]");
    }
    if (bot_score_bot < thresholds.bot_cutoff || bot_score_human >= thresholds.bot_cutoff) {
        throw ConfigError("bot scores must fall on the intended sides of bot_cutoff");
    }
    if (filler_share_probability < 0.0 || filler_share_probability > 1.0) {
        throw ConfigError("filler_share_probability must be in [0,1]");
    }
    for (const auto& [metric, model] : engagement) {
        bool known = false;
        for (const char* m : kEngagementMetrics) known = known || metric == m;
        if (!known) throw ConfigError("unknown engagement metric: " + metric);
        if (model.sigma < 0.0) throw ConfigError("engagement sigma must be non-negative");
    }
}

SimulationConfig parse_simulation_config(const nlohmann::json& doc) {
    SimulationConfig cfg;
    try {
        cfg.seed = doc.at("seed").get<std::uint64_t>();
        cfg.n_bots = doc.at("n_bots").get<std::int64_t>();
        cfg.n_humans = doc.at("n_humans").get<std::int64_t>();
        const auto& tpu = doc.at("tweets_per_user");
        cfg.tweets_min = tpu.at("min").get<std::int64_t>();
        cfg.tweets_max = tpu.at("max").get<std::int64_t>();
        auto parse_prev = [](const nlohmann::json& j) {
            std::array<double, kConstructCount> out{};
            for (auto it = j.begin(); it != j.end(); ++it) {
                auto c = construct_from_name(it.key());
                if (!c) throw ConfigError("unknown construct in prevalence: " + it.key());
                out[static_cast<std::size_t>(*c)] = it.value().get<double>();
            }
            return out;
        };
        const auto& prev = doc.at("prevalence");
        if (prev.contains("bot")) cfg.prevalence_bot = parse_prev(prev.at("bot"));
        if (prev.contains("human")) cfg.prevalence_human = parse_prev(prev.at("human"));
        for (const auto& b : doc.value("cooccurrence_boosts", nlohmann::json::array())) {
            CooccurrenceBoost boost;
            auto f = construct_from_name(b.at("first").get<std::string>());
            auto s = construct_from_name(b.at("second").get<std::string>());
            if (!f || !s) throw ConfigError("unknown construct in cooccurrence_boosts");
            boost.first = *f;
            boost.second = *s;
            boost.probability = b.at("probability").get<double>();
            cfg.boosts.push_back(boost);
        }
        if (doc.contains("engagement")) {
            for (auto it = doc.at("engagement").begin(); it != doc.at("engagement").end();
                 ++it) {
                EngagementModel m;
                const auto& alpha = it.value().at("alpha");
                if (!alpha.is_array() || alpha.size() != m.alpha.size()) {
                    throw ConfigError("engagement alpha needs the intercept plus one slope "
                                      "per construct (8 numbers)");
                }
                for (std::size_t i = 0; i < m.alpha.size(); ++i) {
                    m.alpha[i] = alpha[i].get<double>();
                }
                m.sigma = it.value().at("sigma").get<double>();
                cfg.engagement[it.key()] = m;
            }
        }
        if (doc.contains("thresholds")) {
            const auto& t = doc.at("thresholds");
            cfg.thresholds.k_availability = t.value("availability", cfg.thresholds.k_availability);
            cfg.thresholds.k_illusory = t.value("illusory_truth", cfg.thresholds.k_illusory);
            cfg.thresholds.k_confirmation = t.value("confirmation", cfg.thresholds.k_confirmation);
            cfg.thresholds.k_affect = t.value("affect", cfg.thresholds.k_affect);
            cfg.thresholds.k_negativity = t.value("negativity", cfg.thresholds.k_negativity);
            cfg.thresholds.similarity = t.value("similarity", cfg.thresholds.similarity);
            cfg.thresholds.bot_cutoff = t.value("bot_cutoff", cfg.thresholds.bot_cutoff);
            cfg.thresholds.confirmation_strict =
                t.value("confirmation_strict", cfg.thresholds.confirmation_strict);
        }
        if (doc.contains("bot_scores")) {
            cfg.bot_score_bot = doc.at("bot_scores").at("bot").get<double>();
            cfg.bot_score_human = doc.at("bot_scores").at("human").get<double>();
        }
        cfg.dissonance_conforming = doc.value("dissonance_conforming", cfg.dissonance_conforming);
        cfg.filler_share_probability =
            doc.value("filler_share_probability", cfg.filler_share_probability);
        cfg.lexicon_dir = doc.value("lexicon_dir", cfg.lexicon_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad simulation config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

SimulationConfig load_simulation_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open simulation config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad JSON in " + path + ": " + e.what());
    }
    return parse_simulation_config(doc);
}

SimulationOutput generate_corpus(const SimulationConfig& config, const Lexicon& lexicon,
                                 int jobs) {
    config.validate();
    check_scaffolding(lexicon);
    TermPools pools = build_pools(lexicon);
    if (pools.affiliation.empty()) {
        throw ConfigError("no usable affiliation terms (each must be free of authority "
                          "terms) to build account bios from");
    }
    auto used = [&](Construct c) {
        std::size_t i = static_cast<std::size_t>(c);
        bool base = config.prevalence_bot[i] > 0.0 || config.prevalence_human[i] > 0.0;
        for (const auto& b : config.boosts) base = base || b.second == c;
        return base;
    };
    if (used(Construct::AffectNegativity)) {
        if (pools.emotion.size() < static_cast<std::size_t>(config.thresholds.k_affect) ||
            pools.negative.size() < static_cast<std::size_t>(config.thresholds.k_negativity)) {
            throw ConfigError("affect planting needs at least k usable emotion and "
                              "negative terms");
        }
    }
    if (used(Construct::Authority) && pools.authority.empty()) {
        throw ConfigError("authority planting needs a usable authority term");
    }
    bool stancey = used(Construct::Confirmation) || used(Construct::CognitiveDissonance);
    if (stancey && (pools.pro.empty() || pools.anti.empty())) {
        throw ConfigError("confirmation/dissonance planting needs usable stance terms on "
                          "both sides");
    }

    std::int64_t n = config.n_bots + config.n_humans;
    std::vector<UserBundle> bundles(static_cast<std::size_t>(n));
    EmbeddingProvider provider;
    parallel_chunks(static_cast<std::size_t>(n), jobs, 64,
                    [&](std::size_t begin, std::size_t end) {
                        for (std::size_t ord = begin; ord < end; ++ord) {
                            UserGenerator gen(config, lexicon, pools, provider,
                                              static_cast<std::int64_t>(ord));
                            bundles[ord] = gen.run();
                        }
                    });

    SimulationOutput out;
    std::size_t total_tweets = 0, total_profiles = 0;
    for (const auto& b : bundles) {
        total_tweets += b.own.size() + b.side_tweets.size();
        total_profiles += 1 + b.side_profiles.size();
    }
    out.tweets.reserve(total_tweets);
    out.profiles.reserve(total_profiles);
    out.truth.vectors.reserve(total_tweets);
    for (auto& b : bundles) {
        for (std::size_t i = 0; i < b.own.size(); ++i) {
            out.truth.vectors.push_back({b.own[i].tweet_id, b.own_flags[i]});
            out.tweets.push_back(std::move(b.own[i]));
        }
        for (auto& t : b.side_tweets) {
            out.truth.vectors.push_back({t.tweet_id, TriggerFlags{}});
            out.tweets.push_back(std::move(t));
        }
        out.profiles.push_back(std::move(b.profile));
        for (auto& p : b.side_profiles) out.profiles.push_back(std::move(p));
    }

    // Canonical emission order: profiles by user id; tweets grouped by
    // author (lexicographic), timeline order within; truth by tweet id.
    std::sort(out.profiles.begin(), out.profiles.end(),
              [](const UserProfile& a, const UserProfile& b) { return a.user_id < b.user_id; });
    std::sort(out.tweets.begin(), out.tweets.end(),
              [](const TweetRecord& a, const TweetRecord& b) {
                  if (a.author_id != b.author_id) return a.author_id < b.author_id;
                  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                  return a.tweet_id < b.tweet_id;
              });
    std::sort(out.truth.vectors.begin(), out.truth.vectors.end(),
              [](const TriggerVector& a, const TriggerVector& b) {
                  return a.tweet_id < b.tweet_id;
              });
    return out;
}

ConfusionReport verify_against_truth(const std::vector<TriggerVector>& detected,
                                     const std::vector<TriggerVector>& truth) {
    if (detected.size() != truth.size()) {
        throw CoverageError("detected and truth cover different tweet counts (" +
                            std::to_string(detected.size()) + " vs " +
                            std::to_string(truth.size()) + ")");
    }
    auto by_id = [](const TriggerVector* a, const TriggerVector* b) {
        return a->tweet_id < b->tweet_id;
    };
    std::vector<const TriggerVector*> det, tru;
    det.reserve(detected.size());
    tru.reserve(truth.size());
    for (const auto& v : detected) det.push_back(&v);
    for (const auto& v : truth) tru.push_back(&v);
    std::sort(det.begin(), det.end(), by_id);
    std::sort(tru.begin(), tru.end(), by_id);

    ConfusionReport report;
    report.tweets = truth.size();
    for (std::size_t i = 0; i < det.size(); ++i) {
        if (det[i]->tweet_id != tru[i]->tweet_id) {
            throw CoverageError("detected and truth cover different tweet ids (first "
                                "difference near '" + det[i]->tweet_id + "')");
        }
        for (std::size_t c = 0; c < kConstructCount; ++c) {
            bool got = det[i]->flags.construct_flag(static_cast<Construct>(c));
            bool want = tru[i]->flags.construct_flag(static_cast<Construct>(c));
            auto& cell = report.by_construct[c];
            if (got && want) ++cell.true_positives;
            else if (got && !want) ++cell.false_positives;
            else if (!got && want) ++cell.false_negatives;
            else ++cell.true_negatives;
        }
    }
    report.exact_match = true;
    for (const auto& cell : report.by_construct) {
        if (cell.false_positives != 0 || cell.false_negatives != 0) {
            report.exact_match = false;
        }
    }
    return report;
}

}  // namespace biaslens
