#include <doctest.h>

#include <string>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/errors.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/network.hpp"

using namespace biaslens;

namespace {

Lexicon test_lexicon() {
    return Lexicon::from_terms({
        {LexCategory::Emotion, {"love"}},
        {LexCategory::Negative, {"danger"}},
        {LexCategory::Authority, {"doctor"}},
        {LexCategory::Affiliation, {"patriot"}},
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

    Corpus build() { return Corpus(std::move(tweets), std::move(profiles)); }
};

}  // namespace

TEST_CASE("ego network collects both directions") {
    CorpusBuilder b;
    b.add("e1", "ego", "hello world");
    TweetRecord& r = b.add("e2", "ego", "@ally nice one");
    r.mentioned_user_ids = {"ally"};
    b.add("a1", "ally", "something");
    TweetRecord& rt = b.add("f1", "fan", "hello world");
    rt.retweeted_tweet_id = "e1";
    TweetRecord& rep = b.add("f2", "critic", "disagree");
    rep.replied_to_tweet_id = "e1";
    b.add("x1", "stranger", "unrelated");
    Corpus c = b.build();

    EgoNetwork net = build_ego_network(c, "ego");
    CHECK(net.ego_id == "ego");
    CHECK(net.neighbors == std::vector<std::string>{"ally", "critic", "fan"});
    REQUIRE(net.edges.size() == 3);
    CHECK(net.edges[0].neighbor_id == "ally");
    CHECK(net.edges[0].kind == "mention");
    CHECK(net.edges[1].neighbor_id == "critic");
    CHECK(net.edges[1].kind == "reply");
    CHECK(net.edges[2].neighbor_id == "fan");
    CHECK(net.edges[2].kind == "retweet");
    CHECK_THROWS_AS(build_ego_network(c, "nobody"), UnknownUserError);

    std::string dump = dump_edge_list(net);
    CHECK(dump.find("ego\tally\tmention\te2") != std::string::npos);
}

TEST_CASE("modal stance of a user") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    b.add("p1", "u", "please vaccinate");
    b.add("p2", "u", "really, vaccinate");
    b.add("a1", "u", "maybe a hoax");
    b.add("n1", "u", "lunch was fine");
    b.add("t1", "tied", "please vaccinate");
    b.add("t2", "tied", "what a hoax");
    b.add("z1", "quiet", "nothing stancey");
    Corpus c = b.build();

    CHECK(modal_stance(c, "u", stance).value() == Stance::Pro);
    CHECK_FALSE(modal_stance(c, "tied", stance).has_value());
    CHECK_FALSE(modal_stance(c, "quiet", stance).has_value());
}

TEST_CASE("network majority needs a strict majority of voters") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    // Ego interacts with three stance-bearing users and one silent one.
    TweetRecord& m = b.add("e1", "ego", "@a @b @c @quiet hello");
    m.mentioned_user_ids = {"a", "b", "c", "quiet"};
    b.add("a1", "a", "vaccinate now");
    b.add("b1", "b", "vaccinate everyone");
    b.add("c1", "c", "such a hoax");
    b.add("q1", "quiet", "no opinion here");
    Corpus c = b.build();

    EgoNetwork net = build_ego_network(c, "ego");
    // Voters: a=pro, b=pro, c=anti; quiet abstains. 2 of 3 is a majority.
    CHECK(network_majority_stance(c, net, stance) == MajorityStance::Pro);
    CHECK(std::string(majority_name(MajorityStance::Pro)) == "pro");
    CHECK(std::string(majority_name(MajorityStance::NoMajority)) == "none");
}

TEST_CASE("network majority tie gives none") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    TweetRecord& m = b.add("e1", "ego", "@a @c morning");
    m.mentioned_user_ids = {"a", "c"};
    b.add("a1", "a", "vaccinate now");
    b.add("c1", "c", "such a hoax");
    Corpus c = b.build();
    EgoNetwork net = build_ego_network(c, "ego");
    CHECK(network_majority_stance(c, net, stance) == MajorityStance::NoMajority);
}

TEST_CASE("dissonance flags conforming tweets after divergence") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    b.add("e1", "ego", "vaccinate please");      // pro before any divergence
    b.add("e2", "ego", "actually a hoax");       // divergent
    b.add("e3", "ego", "fine, vaccinate");       // conforming, flagged
    b.add("e4", "ego", "lunch break");           // neutral, ignored
    b.add("e5", "ego", "safe and effective ok"); // conforming, flagged
    Corpus c = b.build();
    auto flagged = detect_cognitive_dissonance(c, c.timeline("ego"),
                                               MajorityStance::Pro, stance);
    std::vector<std::string> ids;
    for (std::size_t i : flagged) ids.push_back(c.tweets()[i].tweet_id);
    CHECK(ids == std::vector<std::string>{"e3", "e5"});

    // No divergence: nothing to flag.
    CorpusBuilder b2;
    b2.add("p1", "u", "vaccinate please");
    b2.add("p2", "u", "vaccinate again");
    Corpus c2 = b2.build();
    CHECK(detect_cognitive_dissonance(c2, c2.timeline("u"), MajorityStance::Pro,
                                      stance).empty());

    // No majority: nothing to conform to.
    CHECK(detect_cognitive_dissonance(c, c.timeline("ego"), MajorityStance::NoMajority,
                                      stance).empty());
}

TEST_CASE("corpus wide dissonance pass") {
    Lexicon lex = test_lexicon();
    StanceFn stance = default_stance_fn(lex);
    CorpusBuilder b;
    // Ego's one neighbor votes pro; ego swings anti then pro.
    TweetRecord& m = b.add("e0", "ego", "@peer hello");
    m.mentioned_user_ids = {"peer"};
    b.add("e1", "ego", "this is a hoax");
    b.add("e2", "ego", "ok, vaccinate");
    b.add("p1", "peer", "vaccinate now");
    // Single stance-bearing tweet: user skipped entirely.
    TweetRecord& m2 = b.add("s0", "solo", "@peer hi");
    m2.mentioned_user_ids = {"peer"};
    b.add("s1", "solo", "vaccinate maybe");
    Corpus c = b.build();

    std::vector<bool> flags = dissonance_flags(c, stance, 2);
    REQUIRE(flags.size() == c.tweets().size());
    auto flag_of = [&](const char* id) {
        const TweetRecord* t = c.find_tweet(id);
        REQUIRE(t != nullptr);
        return flags[static_cast<std::size_t>(t - c.tweets().data())];
    };
    CHECK_FALSE(flag_of("e1"));  // the divergent tweet itself
    CHECK(flag_of("e2"));        // conforming after divergence
    CHECK_FALSE(flag_of("p1"));
    CHECK_FALSE(flag_of("s1"));  // below the two stance-bearing tweet minimum
    CHECK_FALSE(flag_of("e0"));
}
