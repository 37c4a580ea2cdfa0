#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/errors.hpp"
#include "biaslens/rng.hpp"
#include "biaslens/similarity.hpp"

using namespace biaslens;

namespace {

// Reference clusterer: same contract as near_duplicate_clusters but written
// as the obvious quadratic scan, used to pin the production behavior.
std::vector<DuplicateCluster> reference_clusters(
    const std::vector<std::pair<std::string, std::string>>& ids_and_texts,
    double threshold, const EmbeddingProvider& provider) {
    std::vector<DuplicateCluster> clusters;
    std::vector<std::string> seen_texts;
    for (const auto& [id, text] : ids_and_texts) {
        if (std::find(seen_texts.begin(), seen_texts.end(), text) != seen_texts.end()) {
            continue;  // exact repeat of an earlier text
        }
        seen_texts.push_back(text);
        EmbeddingVector e = provider.embed_tweet(id, text);
        bool placed = false;
        for (auto& c : clusters) {
            if (cosine(e, c.representative_embedding) >= threshold) {
                c.member_tweet_ids.push_back(id);
                placed = true;
                break;
            }
        }
        if (!placed) {
            clusters.push_back({id, {id}, e});
        }
    }
    return clusters;
}

std::string random_text(SplitMix64& rng) {
    static const char* words[] = {"alpha", "bravo", "charlie", "delta", "echo",
                                  "foxtrot", "golf", "hotel", "india", "juliet",
                                  "kilo", "lima", "mike", "november", "oscar"};
    std::size_t len = 3 + rng.uniform_int(8);
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        if (i) out += ' ';
        out += words[rng.uniform_int(15)];
    }
    return out;
}

}  // namespace

TEST_CASE("embedding is normalized and deterministic") {
    EmbeddingVector e1 = embed_text("the quick brown fox");
    EmbeddingVector e2 = embed_text("the quick brown fox");
    CHECK(e1 == e2);
    CHECK(e1.size() == kDefaultEmbeddingDim);
    double norm = 0.0;
    for (float v : e1) norm += static_cast<double>(v) * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(cosine(e1, e2) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("embedding ignores urls mentions and case") {
    EmbeddingVector a = embed_text("Check THIS out");
    EmbeddingVector b = embed_text("check this out https://t.co/abc @someone");
    CHECK(cosine(a, b) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("short or empty text embeds to zero") {
    EmbeddingVector z = embed_text("");
    CHECK(std::all_of(z.begin(), z.end(), [](float v) { return v == 0.0f; }));
    EmbeddingVector z2 = embed_text("ab");  // below shortest n-gram
    CHECK(std::all_of(z2.begin(), z2.end(), [](float v) { return v == 0.0f; }));
    CHECK(cosine(z, embed_text("hello there")) == doctest::Approx(0.0));
}

TEST_CASE("cosine basics") {
    EmbeddingVector a{1.0f, 0.0f};
    EmbeddingVector b{0.0f, 1.0f};
    EmbeddingVector c{1.0f, 1.0f};
    CHECK(cosine(a, b) == doctest::Approx(0.0));
    CHECK(cosine(a, a) == doctest::Approx(1.0));
    CHECK(cosine(a, c) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
    CHECK_THROWS_AS(cosine(a, EmbeddingVector{1.0f, 0.0f, 0.0f}), DimensionMismatchError);
}

TEST_CASE("related texts score higher than unrelated") {
    double close = cosine(embed_text("the vaccine rollout started this week"),
                          embed_text("the vaccine rollout started last week"));
    double far = cosine(embed_text("the vaccine rollout started this week"),
                        embed_text("totally different topic about gardening tips"));
    CHECK(close > 0.8);
    CHECK(far < 0.5);
    CHECK(close > far);
}

TEST_CASE("near duplicate clustering joins first matching cluster") {
    EmbeddingProvider provider;
    std::vector<std::pair<std::string, std::string>> posts = {
        {"t1", "breaking news about the new vaccine study results"},
        {"t2", "breaking news about the new vaccine study results today"},
        {"t3", "completely unrelated gardening content here"},
        {"t4", "breaking news about that new vaccine study result"},
    };
    auto clusters = near_duplicate_clusters(posts, 0.8, provider);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].representative_tweet_id == "t1");
    CHECK(clusters[0].member_tweet_ids == std::vector<std::string>{"t1", "t2", "t4"});
    CHECK(clusters[1].member_tweet_ids == std::vector<std::string>{"t3"});
}

TEST_CASE("exact duplicate texts are excluded from clustering") {
    EmbeddingProvider provider;
    std::vector<std::pair<std::string, std::string>> posts = {
        {"t1", "same exact text posted over and over many times"},
        {"t2", "same exact text posted over and over many times"},
        {"t3", "same exact text posted over and over many times"},
        {"t4", "same exact text posted over and over many times today"},
    };
    auto clusters = near_duplicate_clusters(posts, 0.8, provider);
    REQUIRE(clusters.size() == 1);
    // First occurrence stays, repeats vanish, near-variant still joins.
    CHECK(clusters[0].member_tweet_ids == std::vector<std::string>{"t1", "t4"});
}

TEST_CASE("clustering matches quadratic reference on random timelines") {
    EmbeddingProvider provider;
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.uniform_int(200);
        std::vector<std::pair<std::string, std::string>> posts;
        posts.reserve(n);
        std::vector<std::string> base_texts;
        for (std::size_t i = 0; i < n; ++i) {
            std::string text;
            double roll = rng.uniform();
            if (roll < 0.25 && !base_texts.empty()) {
                // exact repeat of an earlier text
                text = base_texts[rng.uniform_int(base_texts.size())];
            } else if (roll < 0.55 && !base_texts.empty()) {
                // near variant: append one word
                text = base_texts[rng.uniform_int(base_texts.size())] + " indeed";
            } else {
                text = random_text(rng);
            }
            base_texts.push_back(text);
            posts.push_back({"p" + std::to_string(i), text});
        }
        double threshold = 0.7 + 0.05 * static_cast<double>(rng.uniform_int(5));
        auto got = near_duplicate_clusters(posts, threshold, provider);
        auto want = reference_clusters(posts, threshold, provider);
        REQUIRE(got.size() == want.size());
        for (std::size_t c = 0; c < got.size(); ++c) {
            CHECK(got[c].representative_tweet_id == want[c].representative_tweet_id);
            CHECK(got[c].member_tweet_ids == want[c].member_tweet_ids);
        }
    }
}

TEST_CASE("sidecar embeddings override the hashed embedding") {
    std::string path = "/tmp/biaslens_sidecar_test.jsonl";
    {
        std::ofstream out(path);
        out << "{\"tweet_id\":\"t1\",\"vector\":[1.0,0.0]}\n";
        out << "{\"tweet_id\":\"t2\",\"vector\":[0.0,1.0]}\n";
    }
    EmbeddingProvider provider = EmbeddingProvider::with_sidecar(path);
    CHECK(provider.dim() == 2);
    EmbeddingVector e1 = provider.embed_tweet("t1", "whatever text");
    CHECK(e1 == EmbeddingVector{1.0f, 0.0f});
    // Unknown ids fall back to the hashed embedding at the sidecar dim.
    EmbeddingVector e3 = provider.embed_tweet("t3", "some text here");
    CHECK(e3.size() == 2);
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "{\"tweet_id\":\"t1\",\"vector\":[1.0,0.0]}\n";
        out << "{\"tweet_id\":\"t2\",\"vector\":[0.0,1.0,0.0]}\n";
    }
    CHECK_THROWS_AS(EmbeddingProvider::with_sidecar(path), DimensionMismatchError);
    std::remove(path.c_str());
}

TEST_CASE("narrative filter keeps matches with best category") {
    std::vector<TweetRecord> tweets;
    auto add = [&](const char* id, std::int64_t ts, const char* text) {
        TweetRecord t;
        t.tweet_id = id;
        t.author_id = "u";
        t.timestamp = ts;
        t.text = text;
        tweets.push_back(t);
    };
    add("t1", 100, "the vaccine rollout started this week in the city");
    add("t2", 50, "planting tomatoes in the garden this weekend again");
    add("t3", 200, "vaccine rollout started this week across the city");
    Corpus corpus(std::move(tweets), {});
    std::vector<ReferenceNarrative> refs = {
        {"the vaccine rollout started this week in the city", "vaccine"},
        {"planting tomatoes in the garden this weekend", "gardening"},
    };
    EmbeddingProvider provider;
    NarrativeFilterResult r = narrative_filter(corpus, refs, 0.8, provider, 2);
    REQUIRE(r.kept.size() == 3);
    // Ordered by (timestamp, tweet_id).
    CHECK(r.kept[0].first == "t2");
    CHECK(r.kept[0].second == "gardening");
    CHECK(r.kept[1].first == "t1");
    CHECK(r.kept[1].second == "vaccine");
    CHECK(r.kept[2].first == "t3");
    CHECK(r.dropped == 0);

    NarrativeFilterResult strict = narrative_filter(corpus, refs, 0.999, provider, 1);
    CHECK(strict.kept.size() == 1);  // only the verbatim t1 survives
    CHECK(strict.dropped == 2);

    CHECK_THROWS_AS(narrative_filter(corpus, {}, 0.8, provider, 1), EmptyReferenceError);
}

TEST_CASE("narrative file loads") {
    std::string path = "/tmp/biaslens_refs_test.jsonl";
    {
        std::ofstream out(path);
        out << "{\"text\":\"some narrative\",\"category\":\"a\"}\n";
        out << "{\"text\":\"другой текст\",\"category\":\"b\"}\n";
    }
    auto refs = load_reference_narratives(path);
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].category == "a");
    CHECK(refs[1].text == "другой текст");
    std::remove(path.c_str());
}
