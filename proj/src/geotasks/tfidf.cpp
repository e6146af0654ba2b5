#include "dialnorm/geotasks/tfidf.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace dialnorm::geo {

void VectorizerConfig::validate() const {
    if (ngram_lo < 1 || ngram_hi < ngram_lo) {
        throw ConfigError("ngram range must satisfy 1 <= lo <= hi, got (" + std::to_string(ngram_lo) + ", " +
                          std::to_string(ngram_hi) + ")");
    }
    if (min_df < 1) throw ConfigError("min_df must be >= 1");
}

std::vector<std::string> extract_terms(std::string_view text, const VectorizerConfig& cfg) {
    const std::string prepared = cfg.lowercase ? unicode::to_lower(text) : std::string(text);
    std::vector<std::string> terms;

    if (cfg.analyzer == Analyzer::Word) {
        std::vector<std::string> words;
        for (auto& tok : unicode::tokenize(prepared)) words.push_back(std::move(tok.text));
        for (int n = cfg.ngram_lo; n <= cfg.ngram_hi; ++n) {
            const auto un = static_cast<std::size_t>(n);
            for (std::size_t i = 0; i + un <= words.size(); ++i) {
                std::string term = words[i];
                for (std::size_t j = 1; j < un; ++j) term += ' ' + words[i + j];
                terms.push_back(std::move(term));
            }
        }
        return terms;
    }

    // Character n-grams over the whitespace-collapsed text.
    std::u32string cps;
    bool last_space = false;
    for (char32_t cp : unicode::decode(prepared)) {
        if (unicode::is_whitespace(cp)) {
            if (!last_space) cps.push_back(U' ');
            last_space = true;
        } else {
            cps.push_back(cp);
            last_space = false;
        }
    }
    for (int n = cfg.ngram_lo; n <= cfg.ngram_hi; ++n) {
        const auto un = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i + un <= cps.size(); ++i) {
            terms.push_back(unicode::encode(std::u32string_view(cps).substr(i, un)));
        }
    }
    return terms;
}

void TfidfVectorizer::fit(const std::vector<std::string>& train_texts) {
    cfg_.validate();
    if (train_texts.empty()) throw ConfigError("cannot fit a vectorizer on an empty training set");

    std::unordered_map<std::string, int> doc_freq;
    for (const auto& text : train_texts) {
        auto terms = extract_terms(text, cfg_);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        for (auto& t : terms) ++doc_freq[std::move(t)];
    }
    std::vector<std::pair<std::string, int>> kept;
    for (auto& [term, df] : doc_freq) {
        if (df >= cfg_.min_df) kept.emplace_back(term, df);
    }
    if (kept.empty()) {
        throw ConfigError("empty vocabulary after applying min_df=" + std::to_string(cfg_.min_df));
    }
    std::sort(kept.begin(), kept.end());

    const auto n_docs = static_cast<double>(train_texts.size());
    terms_.clear();
    index_.clear();
    idf_.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        idf_(idx) = std::log((1.0 + n_docs) / (1.0 + kept[i].second)) + 1.0;
        index_.emplace(kept[i].first, idx);
        terms_.push_back(std::move(kept[i].first));
    }
}

FeatureMatrix TfidfVectorizer::fit_transform(const std::vector<std::string>& train_texts) {
    fit(train_texts);
    return transform(train_texts);
}

Eigen::Index TfidfVectorizer::index_of(const std::string& term) const {
    const auto it = index_.find(term);
    return it == index_.end() ? -1 : it->second;
}

FeatureMatrix TfidfVectorizer::transform(const std::vector<std::string>& texts) const {
    if (terms_.empty()) throw ConfigError("vectorizer is not fitted");
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t row = 0; row < texts.size(); ++row) {
        std::map<Eigen::Index, double> counts;
        for (const auto& term : extract_terms(texts[row], cfg_)) {
            const auto it = index_.find(term);
            if (it != index_.end()) counts[it->second] += 1.0;
        }
        double norm2 = 0.0;
        for (auto& [col, tf] : counts) {
            const double w = (cfg_.sublinear_tf ? 1.0 + std::log(tf) : tf) * idf_(col);
            tf = w;
            norm2 += w * w;
        }
        const double norm = std::sqrt(norm2);
        for (const auto& [col, w] : counts) {
            triplets.emplace_back(static_cast<Eigen::Index>(row), col, w / norm);
        }
    }
    FeatureMatrix X(static_cast<Eigen::Index>(texts.size()), vocabulary_size());
    X.setFromTriplets(triplets.begin(), triplets.end());
    X.makeCompressed();
    return X;
}

TfidfVectorizer TfidfVectorizer::from_parts(VectorizerConfig cfg, std::vector<std::string> terms, Eigen::VectorXd idf) {
    if (static_cast<Eigen::Index>(terms.size()) != idf.size()) {
        throw ValidationError("vocabulary and idf sizes differ");
    }
    TfidfVectorizer v(cfg);
    v.terms_ = std::move(terms);
    v.idf_ = std::move(idf);
    for (std::size_t i = 0; i < v.terms_.size(); ++i) {
        if (!v.index_.emplace(v.terms_[i], static_cast<Eigen::Index>(i)).second) {
            throw ValidationError("duplicate vocabulary term '" + v.terms_[i] + "'");
        }
    }
    return v;
}

}  // namespace dialnorm::geo
