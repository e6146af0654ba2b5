#include "dialnorm/semantics/embedding.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/http.hpp"
#include "dialnorm/unicode.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

namespace dialnorm::sem {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

HashedBowProvider::HashedBowProvider(int dim) : dim_(dim) {
    if (dim < 1) throw ConfigError("embedding dimension must be positive");
}

int HashedBowProvider::bucket_of(std::string_view token) const noexcept {
    return static_cast<int>(fnv1a64(token) % static_cast<std::uint64_t>(dim_));
}

std::vector<TokenVector> HashedBowProvider::embed_tokens(const std::string& text) {
    std::vector<TokenVector> out;
    for (auto& tok : unicode::tokenize(unicode::nfc(text))) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
        v(bucket_of(tok.text)) = 1.0;
        out.push_back({std::move(tok.text), std::move(v)});
    }
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint, int dim, int max_attempts,
                                             std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), dim_(dim), max_attempts_(max_attempts), timeout_(timeout) {
    if (dim < 1) throw ConfigError("embedding dimension must be positive");
    if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
    http::parse_url(endpoint_);
}

std::vector<TokenVector> HttpEmbeddingProvider::embed_tokens(const std::string& text) {
    {
        std::lock_guard lock(mu_);
        if (auto it = memo_.find(text); it != memo_.end()) return it->second;
    }
    const auto url = http::parse_url(endpoint_);
    const std::string body = nlohmann::json{{"text", text}}.dump();
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
        if (attempt > 1) std::this_thread::sleep_for(std::chrono::milliseconds(100) * (1 << (attempt - 2)));
        http::Response res;
        try {
            res = http::post_json(url, body, {}, timeout_);
        } catch (const TransportError& e) {
            last_error = e.reason();
            continue;
        }
        if (res.status >= 500 || res.status == 429) {
            last_error = "HTTP " + std::to_string(res.status);
            continue;
        }
        if (res.status != 200) {
            throw TransportError(attempt, "embedding service returned HTTP " + std::to_string(res.status));
        }
        const auto j = nlohmann::json::parse(res.body, nullptr, false);
        if (j.is_discarded() || !j.contains("tokens") || !j.contains("vectors") || !j["tokens"].is_array() ||
            !j["vectors"].is_array() || j["tokens"].size() != j["vectors"].size()) {
            throw ContentError("embedding reply lacks matching 'tokens' and 'vectors' arrays");
        }
        std::vector<TokenVector> out;
        for (std::size_t i = 0; i < j["tokens"].size(); ++i) {
            const auto& vec = j["vectors"][i];
            if (!vec.is_array() || static_cast<int>(vec.size()) != dim_) {
                throw ContentError("embedding of dimension " + std::to_string(vec.size()) + ", expected " +
                                   std::to_string(dim_));
            }
            Eigen::VectorXd v(dim_);
            for (int d = 0; d < dim_; ++d) v(d) = vec[static_cast<std::size_t>(d)].get<double>();
            out.push_back({j["tokens"][i].get<std::string>(), std::move(v)});
        }
        std::lock_guard lock(mu_);
        return memo_.emplace(text, std::move(out)).first->second;
    }
    throw TransportError(max_attempts_, "embedding service at " + endpoint_ + ": " + last_error);
}

std::vector<RegionVector> region_vectors(const Corpus& c, EmbeddingProvider& provider, int concurrency) {
    const std::size_t n = c.size();
    std::vector<std::optional<Eigen::VectorXd>> proverb(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                const auto toks = provider.embed_tokens(c.records[i].text);
                if (toks.empty()) continue;
                Eigen::VectorXd sum = Eigen::VectorXd::Zero(provider.dim());
                for (const auto& t : toks) {
                    if (t.vector.size() != provider.dim()) throw ContentError("token vector dimension mismatch");
                    sum += t.vector;
                }
                proverb[i] = sum / static_cast<double>(toks.size());
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(concurrency, 1, 64);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        const std::string id = "record " + std::to_string(c.records[i].id) + ": ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const TransportError& e) {
            throw TransportError(e.attempts(), id + e.reason());
        } catch (const ContentError& e) {
            throw ContentError(id + e.what());
        } catch (const std::exception& e) {
            throw Error(id + e.what());
        }
    }

    // Sum in id order so the result does not depend on record order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.records[a].id < c.records[b].id; });

    std::map<std::string, RegionVector> by_region;
    for (const auto i : order) {
        const auto& rec = c.records[i];
        if (!proverb[i]) {
            spdlog::warn("record {} has no tokens to embed; skipped", rec.id);
            continue;
        }
        auto [it, inserted] = by_region.try_emplace(rec.region.name);
        if (inserted) {
            it->second.region = rec.region.name;
            it->second.vector = Eigen::VectorXd::Zero(provider.dim());
        }
        it->second.vector += *proverb[i];
        ++it->second.n_proverbs;
    }
    std::vector<RegionVector> out;
    for (auto& [name, rv] : by_region) {
        rv.vector /= static_cast<double>(rv.n_proverbs);
        out.push_back(std::move(rv));
    }
    return out;
}

Eigen::MatrixXd stack_rows(const std::vector<RegionVector>& rv) {
    if (rv.empty()) return {};
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rv.size()), rv.front().vector.size());
    for (std::size_t i = 0; i < rv.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = rv[i].vector.transpose();
    return X;
}

}  // namespace dialnorm::sem
