#pragma once

#include "dialnorm/corpus.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace dialnorm::sem {

struct TokenVector {
    std::string token;
    Eigen::VectorXd vector;
};

/// Per-token encoder. Implementations must return identical vectors for
/// identical text and be callable from several threads at once.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual int dim() const = 0;
    virtual std::vector<TokenVector> embed_tokens(const std::string& text) = 0;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// One-hot hashed bag of words: each token maps to basis vector
/// fnv1a64(token) mod dim. Tokens come from unicode::tokenize on NFC text.
class HashedBowProvider final : public EmbeddingProvider {
public:
    explicit HashedBowProvider(int dim = 256);
    int dim() const override { return dim_; }
    std::vector<TokenVector> embed_tokens(const std::string& text) override;
    int bucket_of(std::string_view token) const noexcept;

private:
    int dim_;
};

/// Client for an embedding service. Request body: {"text": "..."}; the reply
/// must be {"tokens": [...], "vectors": [[...], ...]} with one vector per
/// token. Replies are memoized per text so repeated calls are stable.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string endpoint, int dim, int max_attempts = 3,
                          std::chrono::milliseconds timeout = std::chrono::seconds(60));
    int dim() const override { return dim_; }
    std::vector<TokenVector> embed_tokens(const std::string& text) override;

private:
    std::string endpoint_;
    int dim_;
    int max_attempts_;
    std::chrono::milliseconds timeout_;
    std::mutex mu_;
    std::map<std::string, std::vector<TokenVector>, std::less<>> memo_;
};

struct RegionVector {
    std::string region;
    Eigen::VectorXd vector;
    int n_proverbs = 0;
};

/// Proverb vector = mean of its token vectors; region vector = mean of its
/// proverb vectors, summed in record-id order. Regions come back sorted by
/// name. Records with no tokens are skipped with a warning. Provider calls
/// run on up to `concurrency` threads.
std::vector<RegionVector> region_vectors(const Corpus& c, EmbeddingProvider& provider, int concurrency = 1);

/// Stacks region vectors as rows.
Eigen::MatrixXd stack_rows(const std::vector<RegionVector>& rv);

}  // namespace dialnorm::sem
