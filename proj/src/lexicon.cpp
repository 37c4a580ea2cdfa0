#include "biaslens/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "biaslens/errors.hpp"

namespace biaslens {

const char* lex_category_file(LexCategory c) {
    switch (c) {
        case LexCategory::Affiliation: return "affiliation.txt";
        case LexCategory::Authority: return "authority.txt";
        case LexCategory::Emotion: return "emotion.txt";
        case LexCategory::Negative: return "negative.txt";
        case LexCategory::StancePro: return "stance_pro.txt";
        case LexCategory::StanceAnti: return "stance_anti.txt";
    }
    return "";
}

const char* stance_name(Stance s) {
    switch (s) {
        case Stance::Pro: return "pro";
        case Stance::Anti: return "anti";
        case Stance::Neutral: return "neutral";
    }
    return "neutral";
}

namespace {

constexpr LexCategory kAllCategories[] = {
    LexCategory::Affiliation, LexCategory::Authority, LexCategory::Emotion,
    LexCategory::Negative,    LexCategory::StancePro, LexCategory::StanceAnti,
};

inline bool is_word_byte(unsigned char ch) {
    return std::isalnum(ch) || ch >= 0x80;
}

inline bool is_mention_byte(unsigned char ch) {
    return std::isalnum(ch) || ch == '_';
}

bool starts_with_ci(const std::string& s, std::size_t pos, const char* prefix) {
    for (std::size_t i = 0; prefix[i] != '\0'; ++i) {
        if (pos + i >= s.size()) {
            return false;
        }
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto flush = [&]() {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };

    while (i < n) {
        unsigned char ch = static_cast<unsigned char>(text[i]);
        // URLs: skip until whitespace.
        if ((ch == 'h' || ch == 'H') &&
            (starts_with_ci(text, i, "http://") || starts_with_ci(text, i, "https://"))) {
            flush();
            while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            continue;
        }
        if ((ch == 'w' || ch == 'W') && current.empty() && starts_with_ci(text, i, "www.")) {
            flush();
            while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            continue;
        }
        // @mentions: drop the whole handle.
        if (ch == '@' && i + 1 < n && is_mention_byte(static_cast<unsigned char>(text[i + 1]))) {
            flush();
            ++i;
            while (i < n && is_mention_byte(static_cast<unsigned char>(text[i]))) ++i;
            continue;
        }
        if (ch == '#') {
            // Keep the tag text, drop the marker.
            ++i;
            continue;
        }
        if (is_word_byte(ch)) {
            current.push_back(ch < 0x80 ? static_cast<char>(std::tolower(ch))
                                        : static_cast<char>(ch));
            ++i;
            continue;
        }
        if (ch == '\'' && !current.empty() && i + 1 < n &&
            is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
            current.push_back('\'');
            ++i;
            continue;
        }
        flush();
        ++i;
    }
    flush();
    return tokens;
}

Lexicon Lexicon::load_directory(const std::string& dir) {
    Lexicon lex;
    for (LexCategory c : kAllCategories) {
        std::string path = dir + "/" + lex_category_file(c);
        std::ifstream in(path);
        if (!in) {
            throw LexiconError("cannot open lexicon file: " + path);
        }
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) {
                line = line.substr(0, hash);
            }
            std::size_t b = line.find_first_not_of(" \t\r\n");
            if (b == std::string::npos) {
                continue;
            }
            std::size_t e = line.find_last_not_of(" \t\r\n");
            lex.add_term(c, line.substr(b, e - b + 1));
        }
    }
    lex.finalize();
    return lex;
}

Lexicon Lexicon::from_terms(
    const std::unordered_map<LexCategory, std::vector<std::string>>& terms) {
    Lexicon lex;
    for (LexCategory c : kAllCategories) {
        auto it = terms.find(c);
        if (it != terms.end()) {
            for (const auto& t : it->second) {
                lex.add_term(c, t);
            }
        }
    }
    lex.finalize();
    return lex;
}

void Lexicon::add_term(LexCategory c, const std::string& term) {
    auto tokens = tokenize(term);
    if (tokens.empty()) {
        return;
    }
    Category& cat = categories_[c];
    cat.raw_terms.push_back(term);
    Phrase p;
    p.tokens = std::move(tokens);
    p.canonical = term;
    cat.by_first[p.tokens.front()].push_back(std::move(p));
}

void Lexicon::finalize() {
    for (LexCategory c : kAllCategories) {
        Category& cat = categories_[c];  // creates empty ones too
        if (cat.raw_terms.empty()) {
            throw LexiconError(std::string("empty lexicon category: ") + lex_category_file(c));
        }
        for (auto& [first, phrases] : cat.by_first) {
            std::stable_sort(phrases.begin(), phrases.end(),
                             [](const Phrase& a, const Phrase& b) {
                                 return a.tokens.size() > b.tokens.size();
                             });
        }
    }
    // Stance categories must be disjoint for stance_of to be well defined.
    std::unordered_set<std::string> pro;
    for (const auto& t : categories_[LexCategory::StancePro].raw_terms) {
        pro.insert(t);
    }
    for (const auto& t : categories_[LexCategory::StanceAnti].raw_terms) {
        if (pro.count(t)) {
            throw LexiconError("term in both stance categories: " + t);
        }
    }
}

const Lexicon::Category& Lexicon::category(LexCategory c) const {
    auto it = categories_.find(c);
    if (it == categories_.end()) {
        throw UnknownCategoryError("unknown lexicon category");
    }
    return it->second;
}

std::size_t Lexicon::count_category(const std::vector<std::string>& tokens,
                                    LexCategory c) const {
    const Category& cat = category(c);
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < tokens.size()) {
        auto it = cat.by_first.find(tokens[i]);
        if (it != cat.by_first.end()) {
            bool matched = false;
            for (const Phrase& p : it->second) {
                if (i + p.tokens.size() <= tokens.size() &&
                    std::equal(p.tokens.begin(), p.tokens.end(), tokens.begin() + i)) {
                    ++count;
                    i += p.tokens.size();
                    matched = true;
                    break;
                }
            }
            if (matched) {
                continue;
            }
        }
        ++i;
    }
    return count;
}

std::vector<std::string> Lexicon::match_terms(const std::vector<std::string>& tokens,
                                              LexCategory c) const {
    const Category& cat = category(c);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::size_t i = 0;
    while (i < tokens.size()) {
        auto it = cat.by_first.find(tokens[i]);
        if (it != cat.by_first.end()) {
            bool matched = false;
            for (const Phrase& p : it->second) {
                if (i + p.tokens.size() <= tokens.size() &&
                    std::equal(p.tokens.begin(), p.tokens.end(), tokens.begin() + i)) {
                    if (seen.insert(p.canonical).second) {
                        out.push_back(p.canonical);
                    }
                    i += p.tokens.size();
                    matched = true;
                    break;
                }
            }
            if (matched) {
                continue;
            }
        }
        ++i;
    }
    return out;
}

const std::vector<std::string>& Lexicon::terms(LexCategory c) const {
    return category(c).raw_terms;
}

std::vector<std::pair<std::string, std::vector<std::string>>> Lexicon::describe() const {
    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    for (LexCategory c : kAllCategories) {
        out.emplace_back(lex_category_file(c), category(c).raw_terms);
    }
    return out;
}

ProfileTerms extract_profile_terms(const std::string& bio, const Lexicon& lexicon) {
    ProfileTerms out;
    auto tokens = tokenize(bio);
    out.affiliations = lexicon.match_terms(tokens, LexCategory::Affiliation);
    out.authority_terms = lexicon.match_terms(tokens, LexCategory::Authority);
    return out;
}

Stance stance_of(const std::string& text, const Lexicon& lexicon) {
    auto tokens = tokenize(text);
    std::size_t pro = lexicon.count_category(tokens, LexCategory::StancePro);
    std::size_t anti = lexicon.count_category(tokens, LexCategory::StanceAnti);
    if (pro > anti) return Stance::Pro;
    if (anti > pro) return Stance::Anti;
    return Stance::Neutral;
}

}  // namespace biaslens
