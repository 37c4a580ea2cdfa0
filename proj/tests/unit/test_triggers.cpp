#include <doctest.h>

#include <string>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/errors.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/triggers.hpp"

using namespace biaslens;

namespace {

Lexicon test_lexicon() {
    return Lexicon::from_terms({
        {LexCategory::Emotion, {"love", "heartbroken", "broke my heart"}},
        {LexCategory::Negative, {"danger", "cover up"}},
        {LexCategory::Authority, {"doctor", "according to experts"}},
        {LexCategory::Affiliation, {"patriot", "progressive"}},
        {LexCategory::StancePro, {"vaccinate", "safe and effective"}},
        {LexCategory::StanceAnti, {"hoax", "natural immunity"}},
    });
}

struct CorpusBuilder {
    std::vector<TweetRecord> tweets;
    std::vector<UserProfile> profiles;
    std::int64_t ts = 1000;

    TweetRecord& add(const std::string& id, const std::string& author, const std::string& text) {
        TweetRecord t;
        t.tweet_id = id;
        t.author_id = author;
        t.timestamp = ts;
        ts += 10;
        t.text = text;
        tweets.push_back(t);
        return tweets.back();
    }

    void user(const std::string& id, const std::string& bio, double score = 0.5) {
        UserProfile p;
        p.user_id = id;
        p.bio = bio;
        p.bot_score = score;
        profiles.push_back(p);
    }

    Corpus build(const Lexicon& lex) {
        Corpus c(std::move(tweets), std::move(profiles));
        c.annotate_profiles(lex);
        return c;
    }
};

std::vector<std::string> ids_of(const Corpus& c, const std::vector<std::size_t>& idxs) {
    std::vector<std::string> out;
    for (std::size_t i : idxs) out.push_back(c.tweets()[i].tweet_id);
    return out;
}

}  // namespace

TEST_CASE("derived repetition threshold") {
    DerivedThreshold t = derive_threshold({1.19, 2.83});
    CHECK(t.mu == doctest::Approx(2.01).epsilon(1e-12));
    CHECK(t.sigma == doctest::Approx(0.82).epsilon(1e-12));
    CHECK(t.k == 3);

    DerivedThreshold u = derive_threshold({0.67, 1.73});
    CHECK(u.mu == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(u.sigma == doctest::Approx(0.53).epsilon(1e-12));
    CHECK(u.k == 2);

    // mu + sigma exactly integral: ceil changes nothing.
    CHECK(derive_threshold({2.0, 2.0, 2.0}).k == 2);
    // Degenerate all-zero cue still yields a usable threshold.
    CHECK(derive_threshold({0.0, 0.0, 0.0}).k == 1);
    CHECK(derive_threshold({1.0, 3.0}).k == 3);  // mu 2, sigma 1
    CHECK_THROWS_AS(derive_threshold({}), EmptyInputError);
}

TEST_CASE("threshold config validation") {
    ThresholdConfig c;
    CHECK_NOTHROW(c.validate());
    c.similarity = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.similarity = 1.01;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.similarity = 0.8;
    c.bot_cutoff = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.bot_cutoff = 0.7;
    c.k_availability = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.k_availability = 3;
    c.mode = "magic";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.mode = "auto";
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("trigger flags merge affect and negativity") {
    TriggerFlags f;
    CHECK(f.trigger_count() == 0);
    f.affect = true;
    CHECK(f.affect_negativity());
    CHECK(f.trigger_count() == 1);
    f.negativity = true;
    CHECK(f.trigger_count() == 1);  // one construct, not two
    f.homophily = true;
    f.confirmation = true;
    CHECK(f.trigger_count() == 3);
    TriggerFlags all;
    all.homophily = all.authority = all.availability = all.illusory_truth = true;
    all.affect = all.negativity = all.cognitive_dissonance = all.confirmation = true;
    CHECK(all.trigger_count() == 7);
    CHECK(all.construct_flag(Construct::AffectNegativity));
    CHECK(all.construct_flag(Construct::IllusoryTruth));
}

TEST_CASE("construct names round trip") {
    for (Construct c : all_constructs()) {
        auto back = construct_from_name(construct_name(c));
        REQUIRE(back.has_value());
        CHECK(*back == c);
    }
    CHECK(std::string(construct_name(Construct::AffectNegativity)) == "affect_negativity");
    CHECK_FALSE(construct_from_name("banana").has_value());
}

TEST_CASE("affect and negativity counts against k") {
    Lexicon lex = test_lexicon();
    auto toks = tokenize("love love danger love");
    CHECK(detect_affect(toks, lex, 3));
    CHECK_FALSE(detect_affect(toks, lex, 4));
    CHECK(detect_negativity(toks, lex, 1));
    CHECK_FALSE(detect_negativity(toks, lex, 2));
    // Phrase terms count once per occurrence.
    auto toks2 = tokenize("they broke my heart and it broke my heart again");
    CHECK(detect_affect(toks2, lex, 2));
    CHECK_FALSE(detect_affect(toks2, lex, 3));
}

TEST_CASE("authority three routes") {
    Lexicon lex = test_lexicon();
    CorpusBuilder b;
    b.user("plain", "", 0.5);
    b.user("medic", "practicing doctor", 0.5);
    b.user("fan", "", 0.5);
    b.add("t_text", "plain", "my doctor said rest");
    TweetRecord& m = b.add("t_mention", "fan", "what do you all think");
    m.mentioned_user_ids = {"medic"};
    b.add("t_self", "medic", "nothing special here");
    b.add("t_none", "plain", "nothing special here either");
    TweetRecord& m2 = b.add("t_mention_plain", "fan", "thoughts anyone");
    m2.mentioned_user_ids = {"plain"};
    Corpus c = b.build(lex);

    CHECK(detect_authority(*c.find_tweet("t_text"), c, lex));
    CHECK(detect_authority(*c.find_tweet("t_mention"), c, lex));   // mentioned bio
    CHECK(detect_authority(*c.find_tweet("t_self"), c, lex));      // author bio
    CHECK_FALSE(detect_authority(*c.find_tweet("t_none"), c, lex));
    CHECK_FALSE(detect_authority(*c.find_tweet("t_mention_plain"), c, lex));
}

TEST_CASE("homophily needs shared affiliation with source author") {
    Lexicon lex = test_lexicon();
    CorpusBuilder b;
    b.user("src", "patriot at heart", 0.5);
    b.user("ego", "fellow patriot", 0.5);
    b.user("other", "progressive voice", 0.5);
    b.add("s1", "src", "original claim");
    TweetRecord& rt = b.add("r1", "ego", "original claim");
    rt.retweeted_tweet_id = "s1";
    TweetRecord& rt2 = b.add("r2", "other", "original claim");
    rt2.retweeted_tweet_id = "s1";
    TweetRecord& ghost = b.add("r3", "ego", "where did this go");
    ghost.quoted_tweet_id = "missing";
    b.add("p1", "ego", "not a share at all");
    Corpus c = b.build(lex);

    std::size_t misses = 0;
    CHECK(detect_homophily(*c.find_tweet("r1"), c, &misses));
    CHECK_FALSE(detect_homophily(*c.find_tweet("r2"), c, &misses));  // no overlap
    CHECK_FALSE(detect_homophily(*c.find_tweet("p1"), c, &misses));  // not a share
    CHECK(misses == 0);
    CHECK_FALSE(detect_homophily(*c.find_tweet("r3"), c, &misses));  // source absent
    CHECK(misses == 1);
}

TEST_CASE("availability flags share groups of size k") {
    Lexicon lex = test_lexicon();
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("o1", "other", "popular post");
    b.add("o2", "other", "second post");
    for (int i = 0; i < 3; ++i) {
        TweetRecord& rt = b.add("a" + std::to_string(i), "u", "popular post");
        rt.retweeted_tweet_id = "o1";
    }
    for (int i = 0; i < 2; ++i) {
        TweetRecord& rt = b.add("b" + std::to_string(i), "u", "second post");
        rt.retweeted_tweet_id = "o2";
    }
    // Identical original text repeated is not a share group.
    for (int i = 0; i < 3; ++i) {
        b.add("c" + std::to_string(i), "u", "typed the same thing");
    }
    Corpus c = b.build(lex);
    auto flagged = ids_of(c, detect_availability(c, c.timeline("u"), 3));
    CHECK(flagged == std::vector<std::string>{"a0", "a1", "a2"});
    // Lower threshold catches the pair too.
    auto flagged2 = ids_of(c, detect_availability(c, c.timeline("u"), 2));
    CHECK(flagged2 == std::vector<std::string>{"a0", "a1", "a2", "b0", "b1"});
}

TEST_CASE("availability groups retweets and quotes of one source together") {
    Lexicon lex = test_lexicon();
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("o1", "other", "origin");
    TweetRecord& r = b.add("s1", "u", "origin");
    r.retweeted_tweet_id = "o1";
    TweetRecord& q1 = b.add("s2", "u", "look at this");
    q1.quoted_tweet_id = "o1";
    TweetRecord& q2 = b.add("s3", "u", "again");
    q2.quoted_tweet_id = "o1";
    Corpus c = b.build(lex);
    auto flagged = ids_of(c, detect_availability(c, c.timeline("u"), 3));
    CHECK(flagged == std::vector<std::string>{"s1", "s2", "s3"});
}

TEST_CASE("illusory truth clusters near duplicate originals") {
    Lexicon lex = test_lexicon();
    EmbeddingProvider provider;
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("n1", "u", "breaking update about the vaccine study results");
    b.add("n2", "u", "breaking update about the vaccine study results today");
    b.add("n3", "u", "breaking update about those vaccine study results");
    b.add("x1", "u", "my garden is doing great this year");
    Corpus c = b.build(lex);
    auto flagged = ids_of(c, detect_illusory_truth(c, c.timeline("u"), 3, 0.8, provider));
    CHECK(flagged == std::vector<std::string>{"n1", "n2", "n3"});
    CHECK(detect_illusory_truth(c, c.timeline("u"), 4, 0.8, provider).empty());
}

TEST_CASE("illusory truth ignores shares and exact repeats") {
    Lexicon lex = test_lexicon();
    EmbeddingProvider provider;
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("o1", "other", "breaking update about the vaccine study results");
    b.add("n1", "u", "breaking update about the vaccine study results");
    b.add("n2", "u", "breaking update about the vaccine study results");  // exact repeat
    TweetRecord& rt = b.add("n3", "u", "breaking update about the vaccine study results");
    rt.retweeted_tweet_id = "o1";  // share, excluded
    b.add("n4", "u", "breaking update about the vaccine study results today");
    Corpus c = b.build(lex);
    // Distinct originals in the cluster: n1, n4 -> below k=3.
    CHECK(detect_illusory_truth(c, c.timeline("u"), 3, 0.8, provider).empty());
    auto flagged = ids_of(c, detect_illusory_truth(c, c.timeline("u"), 2, 0.8, provider));
    CHECK(flagged == std::vector<std::string>{"n1", "n4"});
}

TEST_CASE("confirmation run of same stance tweets") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("p1", "u", "please vaccinate soon");
    b.add("p2", "u", "vaccinate your family");
    b.add("p3", "u", "it is safe and effective");
    b.add("q1", "u", "clearly a hoax");
    Corpus c = b.build(lex);
    auto flagged = ids_of(c, detect_confirmation(c, c.timeline("u"), 3, stance, false));
    CHECK(flagged == std::vector<std::string>{"p1", "p2", "p3"});
    CHECK(detect_confirmation(c, c.timeline("u"), 4, stance, false).empty());
}

TEST_CASE("confirmation neutral handling and strict mode") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("p1", "u", "please vaccinate soon");
    b.add("n1", "u", "had soup for lunch");
    b.add("p2", "u", "vaccinate your family");
    b.add("p3", "u", "it is safe and effective");
    Corpus c = b.build(lex);
    // Neutral tweet is skipped: run is still three pro tweets.
    auto flagged = ids_of(c, detect_confirmation(c, c.timeline("u"), 3, stance, false));
    CHECK(flagged == std::vector<std::string>{"p1", "p2", "p3"});
    // Strict mode: the neutral tweet breaks the run.
    CHECK(detect_confirmation(c, c.timeline("u"), 3, stance, true).empty());
}

TEST_CASE("confirmation run needs distinct texts") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("p1", "u", "please vaccinate soon");
    b.add("p2", "u", "please vaccinate soon");
    b.add("p3", "u", "please vaccinate soon");
    Corpus c = b.build(lex);
    // One distinct text, however long the run.
    CHECK(detect_confirmation(c, c.timeline("u"), 3, stance, false).empty());
    CHECK(detect_confirmation(c, c.timeline("u"), 2, stance, false).empty());
}

TEST_CASE("confirmation single tweet with two agreeing sentences") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    b.user("u", "", 0.5);
    b.add("t1", "u", "vaccinate today. it is safe and effective!");
    b.add("t2", "u", "vaccinate today");
    b.add("t3", "u", "vaccinate now. vaccinate now.");
    b.add("t4", "u", "vaccinate today. but honestly natural immunity works?");
    Corpus c = b.build(lex);
    auto flagged = ids_of(c, detect_confirmation(c, c.timeline("u"), 5, stance, false));
    // Only t1: two distinct pro sentences. t3 repeats one sentence; t4 mixes stances.
    CHECK(flagged == std::vector<std::string>{"t1"});
}

TEST_CASE("sentence splitting") {
    CHECK(split_sentences("first. second! third? fourth") ==
          std::vector<std::string>{"first", "second", "third", "fourth"});
    CHECK(split_sentences("one... two") == std::vector<std::string>{"one", "two"});
    CHECK(split_sentences("   ") == std::vector<std::string>{});
    CHECK(split_sentences("no terminator") == std::vector<std::string>{"no terminator"});
}

TEST_CASE("assembled vectors cover every tweet in id order") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    EmbeddingProvider provider;
    CorpusBuilder b;
    b.user("u", "patriot here", 0.9);
    b.user("v", "", 0.1);
    b.add("t2", "u", "so much love love love here");  // affect at k=3
    b.add("t1", "v", "danger danger everywhere now");  // negativity at k=2
    b.add("t3", "v", "nothing to see");
    Corpus c = b.build(lex);
    ThresholdConfig thresholds;
    DetectionResult r = assemble_trigger_vectors(c, lex, thresholds, stance, nullptr,
                                                 provider, 2);
    REQUIRE(r.vectors.size() == 3);
    CHECK(r.vectors[0].tweet_id == "t1");
    CHECK(r.vectors[1].tweet_id == "t2");
    CHECK(r.vectors[2].tweet_id == "t3");
    CHECK(r.vectors[0].flags.negativity);
    CHECK_FALSE(r.vectors[0].flags.affect);
    CHECK(r.vectors[1].flags.affect);
    CHECK(r.vectors[2].flags == TriggerFlags{});
    CHECK(r.homophily_source_misses == 0);
    // Without a dissonance vector the flag stays unset.
    CHECK_FALSE(r.vectors[0].flags.cognitive_dissonance);
}
