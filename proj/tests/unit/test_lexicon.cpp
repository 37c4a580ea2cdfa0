#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "biaslens/errors.hpp"
#include "biaslens/lexicon.hpp"

using namespace biaslens;

namespace {

Lexicon small_lexicon() {
    return Lexicon::from_terms({
        {LexCategory::Emotion, {"love", "heartbroken", "broke my heart"}},
        {LexCategory::Negative, {"danger", "cover up"}},
        {LexCategory::Authority, {"doctor", "according to experts"}},
        {LexCategory::Affiliation, {"patriot"}},
        {LexCategory::StancePro, {"vaccinate", "safe and effective"}},
        {LexCategory::StanceAnti, {"hoax", "natural immunity"}},
    });
}

}  // namespace

TEST_CASE("tokenize basics") {
    CHECK(tokenize("Hello World") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("  spaces   everywhere  ") == std::vector<std::string>{"spaces", "everywhere"});
    CHECK(tokenize("punct! marks? yes...") == std::vector<std::string>{"punct", "marks", "yes"});
}

TEST_CASE("tokenize strips urls and mentions, keeps hashtag text") {
    CHECK(tokenize("read this https://example.com/x?y=1 now") ==
          std::vector<std::string>{"read", "this", "now"});
    CHECK(tokenize("see www.example.org please") ==
          std::vector<std::string>{"see", "please"});
    CHECK(tokenize("@alice hi @Bob_2 there") == std::vector<std::string>{"hi", "there"});
    CHECK(tokenize("#StayStrong together") == std::vector<std::string>{"staystrong", "together"});
}

TEST_CASE("tokenize hyphens split, apostrophes stay") {
    CHECK(tokenize("well-known fact") == std::vector<std::string>{"well", "known", "fact"});
    CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize("'quoted' word") == std::vector<std::string>{"quoted", "word"});
    CHECK(tokenize("rock 'n' roll") == std::vector<std::string>{"rock", "n", "roll"});
}

TEST_CASE("tokenize digits and non ascii") {
    CHECK(tokenize("covid19 2021 update") == std::vector<std::string>{"covid19", "2021", "update"});
    // UTF-8 bytes pass through as word characters.
    CHECK(tokenize("caf\xC3\xA9 time") == std::vector<std::string>{"caf\xC3\xA9", "time"});
}

TEST_CASE("category counts with multiplicity") {
    Lexicon lex = small_lexicon();
    auto toks = tokenize("love love danger");
    CHECK(lex.count_category(toks, LexCategory::Emotion) == 2);
    CHECK(lex.count_category(toks, LexCategory::Negative) == 1);
    CHECK(lex.count_category(toks, LexCategory::Authority) == 0);
}

TEST_CASE("phrases are greedy longest first and consume tokens") {
    Lexicon lex = small_lexicon();
    // "broke my heart" must match as one phrase, not leave "heartbroken" partials.
    auto toks = tokenize("it broke my heart truly");
    CHECK(lex.count_category(toks, LexCategory::Emotion) == 1);
    auto matched = lex.match_terms(toks, LexCategory::Emotion);
    REQUIRE(matched.size() == 1);
    CHECK(matched[0] == "broke my heart");

    // Phrase followed by a single-word term of the same category.
    auto toks2 = tokenize("according to experts the doctor agrees");
    CHECK(lex.count_category(toks2, LexCategory::Authority) == 2);
    auto m2 = lex.match_terms(toks2, LexCategory::Authority);
    REQUIRE(m2.size() == 2);
    CHECK(m2[0] == "according to experts");
    CHECK(m2[1] == "doctor");

    // A broken phrase does not match.
    auto toks3 = tokenize("according to most experts");
    CHECK(lex.count_category(toks3, LexCategory::Authority) == 0);
}

TEST_CASE("match terms deduplicates in first match order") {
    Lexicon lex = small_lexicon();
    auto toks = tokenize("danger danger cover up");
    auto m = lex.match_terms(toks, LexCategory::Negative);
    REQUIRE(m.size() == 2);
    CHECK(m[0] == "danger");
    CHECK(m[1] == "cover up");
    CHECK(lex.count_category(toks, LexCategory::Negative) == 3);
}

TEST_CASE("stance rule majority wins, ties neutral") {
    Lexicon lex = small_lexicon();
    CHECK(stance_of("please vaccinate today", lex) == Stance::Pro);
    CHECK(stance_of("it is a hoax", lex) == Stance::Anti);
    CHECK(stance_of("nothing stancey here", lex) == Stance::Neutral);
    // One term per side: a tie stays neutral.
    CHECK(stance_of("vaccinate or hoax", lex) == Stance::Neutral);
    CHECK(stance_of("vaccinate because it is safe and effective, not a hoax", lex) == Stance::Pro);
    CHECK(std::string(stance_name(Stance::Pro)) == "pro");
    CHECK(std::string(stance_name(Stance::Anti)) == "anti");
    CHECK(std::string(stance_name(Stance::Neutral)) == "neutral");
}

TEST_CASE("profile term extraction") {
    Lexicon lex = small_lexicon();
    ProfileTerms t = extract_profile_terms("Patriot, doctor, loves danger", lex);
    REQUIRE(t.affiliations.size() == 1);
    CHECK(t.affiliations[0] == "patriot");
    REQUIRE(t.authority_terms.size() == 1);
    CHECK(t.authority_terms[0] == "doctor");
    ProfileTerms none = extract_profile_terms("", lex);
    CHECK(none.affiliations.empty());
    CHECK(none.authority_terms.empty());
}

TEST_CASE("load directory validates categories") {
    namespace fs = std::filesystem;
    fs::path dir = "/tmp/biaslens_lex_test";
    fs::create_directories(dir);
    auto put = [&](const char* name, const char* body) {
        std::ofstream out(dir / name);
        out << body;
    };
    put("emotion.txt", "# comment line\nlove\n  heartbroken  \n\n");
    put("negative.txt", "danger\n");
    put("authority.txt", "doctor\n");
    put("affiliation.txt", "patriot\n");
    put("stance_pro.txt", "vaccinate\n");
    put("stance_anti.txt", "hoax\n");

    Lexicon lex = Lexicon::load_directory(dir.string());
    CHECK(lex.terms(LexCategory::Emotion) == std::vector<std::string>{"love", "heartbroken"});
    CHECK(lex.count_category(tokenize("so heartbroken"), LexCategory::Emotion) == 1);

    // Empty category file rejected.
    put("negative.txt", "# only comments\n");
    CHECK_THROWS_AS(Lexicon::load_directory(dir.string()), LexiconError);
    put("negative.txt", "danger\n");

    // Overlapping stance categories rejected.
    put("stance_anti.txt", "hoax\nvaccinate\n");
    CHECK_THROWS_AS(Lexicon::load_directory(dir.string()), LexiconError);
    put("stance_anti.txt", "hoax\n");

    // Missing file rejected.
    fs::remove(dir / "authority.txt");
    CHECK_THROWS_AS(Lexicon::load_directory(dir.string()), LexiconError);

    fs::remove_all(dir);
}

TEST_CASE("shipped lexicon loads and stances are usable") {
    Lexicon lex = Lexicon::load_directory("data/lexicon");
    CHECK_FALSE(lex.terms(LexCategory::Emotion).empty());
    CHECK_FALSE(lex.terms(LexCategory::StancePro).empty());
    CHECK(stance_of("trust the science and get vaccinated", lex) == Stance::Pro);
    CHECK(stance_of("vaccines are a hoax wake up people", lex) == Stance::Anti);
}
