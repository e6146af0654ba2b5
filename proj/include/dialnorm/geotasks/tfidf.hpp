#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dialnorm::geo {

/// Documents x terms, row-major so each document is a contiguous sparse row.
using FeatureMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Analyzer { CharNgram, Word };

struct VectorizerConfig {
    Analyzer analyzer = Analyzer::CharNgram;
    int ngram_lo = 1;
    int ngram_hi = 4;
    int min_df = 2;
    bool lowercase = true;
    bool sublinear_tf = false;

    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

/// Terms of one document under `cfg`, in occurrence order (with repeats).
std::vector<std::string> extract_terms(std::string_view text, const VectorizerConfig& cfg);

/// Smoothed TF-IDF: idf = ln((1 + N) / (1 + df)) + 1, raw or 1 + ln(tf)
/// term frequency, L2-normalized rows. Terms are indexed in lexicographic
/// byte order so the vocabulary is independent of document order.
class TfidfVectorizer {
public:
    TfidfVectorizer() = default;
    explicit TfidfVectorizer(VectorizerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    FeatureMatrix fit_transform(const std::vector<std::string>& train_texts);
    void fit(const std::vector<std::string>& train_texts);
    /// Terms not in the fitted vocabulary are ignored.
    FeatureMatrix transform(const std::vector<std::string>& texts) const;

    const VectorizerConfig& config() const noexcept { return cfg_; }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const Eigen::VectorXd& idf() const noexcept { return idf_; }
    Eigen::Index vocabulary_size() const noexcept { return static_cast<Eigen::Index>(terms_.size()); }
    /// -1 when the term is not in the vocabulary.
    Eigen::Index index_of(const std::string& term) const;

    /// Rebuilds a fitted vectorizer from serialized parts.
    static TfidfVectorizer from_parts(VectorizerConfig cfg, std::vector<std::string> terms, Eigen::VectorXd idf);

private:
    VectorizerConfig cfg_;
    std::vector<std::string> terms_;
    std::map<std::string, Eigen::Index, std::less<>> index_;
    Eigen::VectorXd idf_;
};

}  // namespace dialnorm::geo
