#include "biaslens/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "biaslens/corpus.hpp"
#include "biaslens/errors.hpp"
#include "biaslens/lexicon.hpp"
#include "biaslens/parallel.hpp"

namespace biaslens {

using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(const char* data, std::size_t len, std::uint64_t seed) {
    std::uint64_t h = kFnvOffset ^ seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<std::uint8_t>(data[i]);
        h *= kFnvPrime;
    }
    return h;
}

std::string normalized_join(const std::string& text) {
    auto tokens = tokenize(text);
    std::string joined;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) {
            joined.push_back(' ');
        }
        joined += tokens[i];
    }
    return joined;
}

}  // namespace

EmbeddingVector embed_text(const std::string& text, std::size_t dim, std::uint64_t seed) {
    EmbeddingVector vec(dim, 0.0f);
    std::string joined = normalized_join(text);
    bool any = false;
    for (std::size_t n = 3; n <= 5; ++n) {
        if (joined.size() < n) {
            continue;
        }
        for (std::size_t i = 0; i + n <= joined.size(); ++i) {
            std::uint64_t h = fnv1a64(joined.data() + i, n, seed);
            vec[h % dim] += 1.0f;
            any = true;
        }
    }
    if (!any) {
        return vec;  // zero vector for empty/too-short text
    }
    double norm = 0.0;
    for (float v : vec) {
        norm += static_cast<double>(v) * v;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (float& v : vec) {
            v = static_cast<float>(v / norm);
        }
    }
    return vec;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatchError("embedding dimensions differ");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::max(-1.0, std::min(1.0, c));
}

EmbeddingProvider EmbeddingProvider::with_sidecar(const std::string& sidecar_path) {
    EmbeddingProvider p;
    std::ifstream in(sidecar_path);
    if (!in) {
        throw IoError("cannot open embedding sidecar: " + sidecar_path);
    }
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw ParseError("embedding sidecar line " + std::to_string(line_no) +
                             ": malformed JSON");
        }
        if (!j.is_object() || !j.contains("tweet_id") || !j.contains("vector") ||
            !j["tweet_id"].is_string() || !j["vector"].is_array()) {
            throw ParseError("embedding sidecar line " + std::to_string(line_no) +
                             ": expected {tweet_id, vector}");
        }
        EmbeddingVector vec;
        vec.reserve(j["vector"].size());
        for (const auto& v : j["vector"]) {
            if (!v.is_number()) {
                throw ParseError("embedding sidecar line " + std::to_string(line_no) +
                                 ": non-numeric vector entry");
            }
            vec.push_back(v.get<float>());
        }
        if (first) {
            p.dim_ = vec.size();
            first = false;
        } else if (vec.size() != p.dim_) {
            throw DimensionMismatchError("embedding sidecar mixes dimensions");
        }
        p.sidecar_[j["tweet_id"].get<std::string>()] = std::move(vec);
    }
    if (first) {
        throw EmptyInputError("embedding sidecar is empty: " + sidecar_path);
    }
    return p;
}

EmbeddingVector EmbeddingProvider::embed_tweet(const std::string& tweet_id,
                                               const std::string& text) const {
    auto it = sidecar_.find(tweet_id);
    if (it != sidecar_.end()) {
        return it->second;
    }
    return embed_text(text, dim_);
}

EmbeddingVector EmbeddingProvider::embed(const std::string& text) const {
    return embed_text(text, dim_);
}

std::vector<DuplicateCluster> near_duplicate_clusters(
    const std::vector<std::pair<std::string, std::string>>& ids_and_texts,
    double threshold, const EmbeddingProvider& provider) {
    std::vector<DuplicateCluster> clusters;
    std::unordered_set<std::string> seen_texts;
    for (const auto& [id, text] : ids_and_texts) {
        if (!seen_texts.insert(text).second) {
            continue;  // exact repeat of an earlier post
        }
        EmbeddingVector vec = provider.embed_tweet(id, text);
        bool joined = false;
        for (auto& cluster : clusters) {
            if (cosine(vec, cluster.representative_embedding) >= threshold) {
                cluster.member_tweet_ids.push_back(id);
                joined = true;
                break;
            }
        }
        if (!joined) {
            DuplicateCluster c;
            c.representative_tweet_id = id;
            c.member_tweet_ids.push_back(id);
            c.representative_embedding = std::move(vec);
            clusters.push_back(std::move(c));
        }
    }
    return clusters;
}

std::vector<ReferenceNarrative> load_reference_narratives(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open reference narratives: " + path);
    }
    std::vector<ReferenceNarrative> refs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw ParseError("reference narratives line " + std::to_string(line_no) +
                             ": malformed JSON");
        }
        if (!j.is_object() || !j.contains("text") || !j.contains("category") ||
            !j["text"].is_string() || !j["category"].is_string()) {
            throw ParseError("reference narratives line " + std::to_string(line_no) +
                             ": expected {text, category}");
        }
        refs.push_back({j["text"].get<std::string>(), j["category"].get<std::string>()});
    }
    return refs;
}

NarrativeFilterResult narrative_filter(const Corpus& corpus,
                                       const std::vector<ReferenceNarrative>& references,
                                       double threshold,
                                       const EmbeddingProvider& provider,
                                       int jobs) {
    if (references.empty()) {
        throw EmptyReferenceError("no reference narratives");
    }
    std::vector<EmbeddingVector> ref_vecs;
    ref_vecs.reserve(references.size());
    for (const auto& r : references) {
        ref_vecs.push_back(provider.embed(r.text));
    }

    // Scan in (timestamp, tweet_id) order so output order is stable.
    std::vector<std::size_t> order;
    order.reserve(corpus.tweets().size());
    for (std::size_t i = 0; i < corpus.tweets().size(); ++i) {
        order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ta = corpus.tweets()[a];
        const auto& tb = corpus.tweets()[b];
        if (ta.timestamp != tb.timestamp) {
            return ta.timestamp < tb.timestamp;
        }
        return ta.tweet_id < tb.tweet_id;
    });

    // -1 = dropped, otherwise index of the best reference.
    std::vector<int> best(order.size(), -1);
    parallel_chunks(order.size(), jobs, 1024, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const auto& t = corpus.tweets()[order[k]];
            EmbeddingVector vec = provider.embed_tweet(t.tweet_id, t.text);
            bool zero = true;
            for (float v : vec) {
                if (v != 0.0f) {
                    zero = false;
                    break;
                }
            }
            if (zero) {
                continue;
            }
            double best_sim = -2.0;
            int best_ref = -1;
            for (std::size_t r = 0; r < ref_vecs.size(); ++r) {
                double sim = cosine(vec, ref_vecs[r]);
                if (sim > best_sim) {
                    best_sim = sim;
                    best_ref = static_cast<int>(r);
                }
            }
            if (best_sim >= threshold) {
                best[k] = best_ref;
            }
        }
    });

    NarrativeFilterResult out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (best[k] >= 0) {
            out.kept.emplace_back(corpus.tweets()[order[k]].tweet_id,
                                  references[best[k]].category);
        } else {
            ++out.dropped;
        }
    }
    return out;
}

}  // namespace biaslens
