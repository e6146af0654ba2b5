#pragma once

#include "dialnorm/corpus.hpp"
#include "dialnorm/csv.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline const std::filesystem::path kSourceDir = DIALNORM_TEST_SOURCE_DIR;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "dialnorm-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Seeded generator helpers for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(integer(0, static_cast<int>(items.size()) - 1))];
    }

    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(lo, hi);
        return m;
    }

    Eigen::MatrixXd ratings(Eigen::Index n, Eigen::Index k) {
        Eigen::MatrixXd m(n, k);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = integer(1, 5);
        return m;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Greek-letter words for text generators.
inline const std::vector<std::string>& greek_words() {
    static const std::vector<std::string> words{"θεός",   "γείτονας", "σπίτι",  "νερό",   "ψωμί",    "καιρός",
                                                "χειμώνας", "κρύο",    "ήλιος",  "δρόμος", "φίλος",   "μάνα",
                                                "παιδί",  "βουνό",    "θάλασσα", "κρασί",  "αλάτι",   "λόγος",
                                                "Ου",     "ου",       "τζαι",   "ντο",    "κι",      "Γίδα"};
    return words;
}

inline std::string random_sentence(Gen& g, int min_words = 1, int max_words = 8) {
    static const std::vector<std::string> seps{" ", " ", " ", ", ", " - ", "; "};
    const int n = g.integer(min_words, max_words);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out += g.pick(seps);
        out += g.pick(greek_words());
    }
    if (g.coin()) out += ".";
    return out;
}

/// In-memory corpus with ids 0..n-1.
inline dialnorm::Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& rows) {
    dialnorm::Corpus c;
    for (const auto& [text, region] : rows) {
        dialnorm::ProverbRecord r;
        r.id = c.records.size();
        r.text = text;
        r.region = dialnorm::Region(region);
        c.records.push_back(std::move(r));
    }
    c.source_digest = "test";
    return c;
}

inline std::string read_text(const std::filesystem::path& p) { return dialnorm::csv::read_file(p); }

}  // namespace testing
