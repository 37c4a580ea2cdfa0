#pragma once

// Lexicon categories and the shared tokenizer. Category files are plain
// text, one term per line, lowercase; '#' starts a comment. Terms may be
// multi-word phrases; matching is greedy, longest-first, non-overlapping.

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace biaslens {

enum class LexCategory {
    Affiliation,
    Authority,
    Emotion,
    Negative,
    StancePro,
    StanceAnti,
};

const char* lex_category_file(LexCategory c);  // e.g. "emotion.txt"

enum class Stance { Pro, Anti, Neutral };

const char* stance_name(Stance s);

// Tokenization: lowercased word tokens. URLs (http://, https://, www.) and
// @mentions are removed before tokenization; '#' is stripped from hashtags
// but the tag text is kept; hyphens split tokens; apostrophes between word
// characters stay inside the token. Non-ASCII bytes are treated as word
// characters and left unchanged (inputs are expected in a consistent
// Unicode normal form).
std::vector<std::string> tokenize(const std::string& text);

class Lexicon {
  public:
    // Loads the six category files from a directory. Throws LexiconError
    // if a file is missing, a category is empty, or the two stance
    // categories overlap.
    static Lexicon load_directory(const std::string& dir);

    // Builds from in-memory term lists (used by tests and the simulator).
    static Lexicon from_terms(
        const std::unordered_map<LexCategory, std::vector<std::string>>& terms);

    // Number of lexicon matches in the token stream, counted with
    // multiplicity. Multi-token phrases consume their tokens, so the count
    // never exceeds the token count.
    std::size_t count_category(const std::vector<std::string>& tokens, LexCategory c) const;

    // Canonical term strings (as listed in the category file) matched in
    // the token stream, deduplicated, in first-match order.
    std::vector<std::string> match_terms(const std::vector<std::string>& tokens,
                                         LexCategory c) const;

    const std::vector<std::string>& terms(LexCategory c) const;

    // Per-file digest input: the raw term lists, category file name -> terms.
    std::vector<std::pair<std::string, std::vector<std::string>>> describe() const;

  private:
    struct Phrase {
        std::vector<std::string> tokens;
        std::string canonical;
    };
    struct Category {
        std::vector<std::string> raw_terms;
        // first token -> phrases starting with it, longest first
        std::unordered_map<std::string, std::vector<Phrase>> by_first;
    };

    const Category& category(LexCategory c) const;
    void add_term(LexCategory c, const std::string& term);
    void finalize();

    std::unordered_map<LexCategory, Category> categories_;
};

struct ProfileTerms {
    std::vector<std::string> affiliations;
    std::vector<std::string> authority_terms;
};

// Affiliation and authority terms found in a profile bio.
ProfileTerms extract_profile_terms(const std::string& bio, const Lexicon& lexicon);

// Default stance rule: count stance_pro vs stance_anti matches; the larger
// side wins, ties and zero counts are Neutral.
Stance stance_of(const std::string& text, const Lexicon& lexicon);

}  // namespace biaslens
