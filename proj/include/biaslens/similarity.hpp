#pragma once

// Text embeddings and near-duplicate detection.
//
// The default embedding is a hashed character n-gram bag: the text is
// tokenized (same rules as the lexicon tokenizer, so URLs/mentions are
// gone and case is folded), tokens are joined with single spaces, and all
// byte n-grams with n in {3,4,5} of the joined string are hashed into a
// fixed number of buckets with 64-bit FNV-1a (offset basis XORed with the
// seed; seed 0 gives plain FNV-1a). Bucket counts are L2-normalized.
// Empty or too-short texts embed to the zero vector.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace biaslens {

class Corpus;

using EmbeddingVector = std::vector<float>;

inline constexpr std::size_t kDefaultEmbeddingDim = 1024;
inline constexpr std::uint64_t kDefaultEmbeddingSeed = 0;

EmbeddingVector embed_text(const std::string& text,
                           std::size_t dim = kDefaultEmbeddingDim,
                           std::uint64_t seed = kDefaultEmbeddingSeed);

// Cosine similarity of two embeddings, clamped to [-1, 1]. Zero vectors
// have similarity 0 with everything. Throws DimensionMismatchError if the
// dimensions differ.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Supplies per-tweet embeddings: precomputed vectors from a sidecar file
// when present, the hashed n-gram embedding otherwise.
class EmbeddingProvider {
  public:
    EmbeddingProvider() = default;

    // Sidecar JSON-lines: {"tweet_id": ..., "vector": [...]}. Dimension is
    // inferred from the first record; mixed dimensions are an error.
    static EmbeddingProvider with_sidecar(const std::string& sidecar_path);

    EmbeddingVector embed_tweet(const std::string& tweet_id, const std::string& text) const;
    EmbeddingVector embed(const std::string& text) const;
    std::size_t dim() const { return dim_; }

  private:
    std::unordered_map<std::string, EmbeddingVector> sidecar_;
    std::size_t dim_ = kDefaultEmbeddingDim;
};

struct DuplicateCluster {
    std::string representative_tweet_id;       // first member in timeline order
    std::vector<std::string> member_tweet_ids; // includes the representative
    EmbeddingVector representative_embedding;
};

// Single-pass greedy leader clustering over tweets in timeline order: a
// tweet joins the first existing cluster whose representative it matches
// at cosine >= threshold, otherwise founds a new cluster. Tweets whose
// text exactly duplicates an already-seen tweet are excluded entirely
// (repetition of the same post is not a set of distinct near-duplicates).
// `ids_and_texts` must be in timeline order.
std::vector<DuplicateCluster> near_duplicate_clusters(
    const std::vector<std::pair<std::string, std::string>>& ids_and_texts,
    double threshold, const EmbeddingProvider& provider = EmbeddingProvider());

struct ReferenceNarrative {
    std::string text;
    std::string category;
};

// Loads JSON-lines {"text": ..., "category": ...}.
std::vector<ReferenceNarrative> load_reference_narratives(const std::string& path);

struct NarrativeFilterResult {
    // Kept tweets with their best-matching reference category, ordered by
    // (timestamp, tweet_id).
    std::vector<std::pair<std::string, std::string>> kept;
    std::size_t dropped = 0;
};

// Keeps tweets whose best cosine against any reference is >= threshold.
// Ties go to the earliest reference in file order. Tweets that embed to
// the zero vector are always dropped. Throws EmptyReferenceError.
NarrativeFilterResult narrative_filter(const Corpus& corpus,
                                       const std::vector<ReferenceNarrative>& references,
                                       double threshold,
                                       const EmbeddingProvider& provider,
                                       int jobs);

}  // namespace biaslens
