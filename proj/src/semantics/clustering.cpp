#include "dialnorm/semantics/clustering.hpp"

#include "dialnorm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dialnorm::sem {

namespace {

std::vector<int> relabel_by_first_appearance(const std::vector<int>& raw) {
    std::vector<int> map;
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0) {
            out[i] = kNoise;
            continue;
        }
        if (static_cast<std::size_t>(raw[i]) >= map.size()) map.resize(static_cast<std::size_t>(raw[i]) + 1, -1);
        auto& slot = map[static_cast<std::size_t>(raw[i])];
        if (slot < 0) slot = static_cast<int>(std::count_if(map.begin(), map.end(), [](int v) { return v >= 0; }));
        out[i] = slot;
    }
    return out;
}

Eigen::MatrixXd pairwise_distances(const Points& X) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) D(i, j) = D(j, i) = (X.row(i) - X.row(j)).norm();
    }
    return D;
}

struct LloydRun {
    std::vector<int> labels;
    double inertia = 0.0;
    std::vector<double> trace;
};

Eigen::MatrixXd plus_plus_seed(const Points& X, int k, std::mt19937_64& rng) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd C(k, X.cols());
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    Eigen::Index pick = first(rng);
    C.row(0) = X.row(pick);
    chosen[static_cast<std::size_t>(pick)] = 1;
    Eigen::VectorXd d2 = (X.rowwise() - C.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            const double target = u(rng);
            double acc = 0.0;
            pick = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (d2(i) <= 0.0) continue;
                acc += d2(i);
                pick = i;
                if (acc >= target) break;
            }
        } else {
            // Every remaining point coincides with a centre; take an unused one.
            std::vector<Eigen::Index> unused;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
            }
            std::uniform_int_distribution<std::size_t> pick_unused(0, unused.size() - 1);
            pick = unused[pick_unused(rng)];
        }
        C.row(c) = X.row(pick);
        chosen[static_cast<std::size_t>(pick)] = 1;
        d2 = d2.cwiseMin((X.rowwise() - C.row(c)).rowwise().squaredNorm());
    }
    return C;
}

double assign(const Points& X, const Eigen::MatrixXd& C, std::vector<int>& labels) {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (Eigen::Index c = 0; c < C.rows(); ++c) {
            const double d = (X.row(i) - C.row(c)).squaredNorm();
            if (d < best) {
                best = d;
                arg = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = arg;
        inertia += best;
    }
    return inertia;
}

double inertia_at(const Points& X, const Eigen::MatrixXd& C, const std::vector<int>& labels) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) s += (X.row(i) - C.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    return s;
}

LloydRun lloyd(const Points& X, int k, std::mt19937_64& rng, int max_iterations) {
    Eigen::MatrixXd C = plus_plus_seed(X, k, rng);
    LloydRun run;
    run.labels.assign(static_cast<std::size_t>(X.rows()), -1);
    std::vector<int> labels(run.labels.size());
    for (int it = 0; it < max_iterations; ++it) {
        run.trace.push_back(assign(X, C, labels));
        const bool stable = labels == run.labels;
        run.labels = labels;
        if (stable) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += X.row(i);
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        // An emptied cluster keeps its previous centre.
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) C.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        }
    }
    run.inertia = inertia_at(X, C, run.labels);
    run.trace.push_back(run.inertia);
    return run;
}

void check_points(const Points& X) {
    if (X.rows() == 0) throw ValidationError("no points to cluster");
    if (!X.allFinite()) throw ValidationError("points contain NaN or infinite values");
}

}  // namespace

ClusterAssignment kmeans(const Points& X, int k, std::uint64_t seed, KMeansOptions opts) {
    check_points(X);
    if (k < 1 || k > X.rows()) {
        throw ConfigError("k must lie in [1, " + std::to_string(X.rows()) + "], got " + std::to_string(k));
    }
    if (opts.restarts < 1 || opts.max_iterations < 1) throw ConfigError("restarts and max_iterations must be positive");
    std::mt19937_64 rng(seed);
    LloydRun best;
    bool have = false;
    for (int r = 0; r < opts.restarts; ++r) {
        LloydRun run = lloyd(X, k, rng, opts.max_iterations);
        if (!have || run.inertia < best.inertia) {
            best = std::move(run);
            have = true;
        }
    }
    ClusterAssignment out;
    out.labels = relabel_by_first_appearance(best.labels);
    out.k = k;
    out.inertia = best.inertia;
    out.inertia_trace = std::move(best.trace);
    out.silhouette = silhouette_score(X, out.labels);
    return out;
}

std::vector<double> silhouette_samples(const Points& X, const std::vector<int>& labels) {
    if (labels.size() != static_cast<std::size_t>(X.rows())) throw ValidationError("one label per point required");
    const auto n = labels.size();
    int k = 0;
    for (const int l : labels) k = std::max(k, l + 1);
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (const int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    const int populated = static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [](int s) { return s > 0; }));

    std::vector<double> s(n, 0.0);
    if (populated < 2) return s;
    const Eigen::MatrixXd D = pairwise_distances(X);
    for (std::size_t i = 0; i < n; ++i) {
        const int li = labels[i];
        if (li < 0 || sizes[static_cast<std::size_t>(li)] < 2) continue;
        std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (labels[j] >= 0 && j != i) sum[static_cast<std::size_t>(labels[j])] += D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        const double a = sum[static_cast<std::size_t>(li)] / (sizes[static_cast<std::size_t>(li)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c != li && sizes[static_cast<std::size_t>(c)] > 0) b = std::min(b, sum[static_cast<std::size_t>(c)] / sizes[static_cast<std::size_t>(c)]);
        }
        const double m = std::max(a, b);
        s[i] = m > 0.0 ? (b - a) / m : 0.0;
    }
    return s;
}

double silhouette_score(const Points& X, const std::vector<int>& labels) {
    const auto s = silhouette_samples(X, labels);
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (labels[i] < 0) continue;
        sum += s[i];
        ++counted;
    }
    return counted ? sum / static_cast<double>(counted) : 0.0;
}

SilhouetteScan silhouette_scan(const Points& X, int k_lo, int k_hi, std::uint64_t seed, KMeansOptions opts) {
    check_points(X);
    const auto n = static_cast<int>(X.rows());
    if (k_lo < 2 || k_hi > n - 1 || k_lo > k_hi) {
        throw ConfigError("silhouette scan needs 2 <= k_lo <= k_hi <= " + std::to_string(n - 1));
    }
    SilhouetteScan scan;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = k_lo; k <= k_hi; ++k) {
        const double score = kmeans(X, k, seed, opts).silhouette;
        scan.ks.push_back(k);
        scan.scores.push_back(score);
        if (score > best) {
            best = score;
            scan.best_k = k;
        }
    }
    return scan;
}

ClusterAssignment agglomerative(const Points& X, int k) {
    check_points(X);
    const auto n = static_cast<int>(X.rows());
    if (k < 1 || k > n) throw ConfigError("k must lie in [1, " + std::to_string(n) + "]");

    Eigen::MatrixXd D = pairwise_distances(X);
    std::vector<int> id(static_cast<std::size_t>(n));
    std::vector<int> size(static_cast<std::size_t>(n), 1);
    std::vector<char> active(static_cast<std::size_t>(n), 1);
    std::vector<int> slot_of_point(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) id[static_cast<std::size_t>(i)] = slot_of_point[static_cast<std::size_t>(i)] = i;

    ClusterAssignment out;
    for (int m = 0; m < n - 1; ++m) {
        int bi = -1;
        int bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (active[static_cast<std::size_t>(j)] && D(i, j) < best) {
                    best = D(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        const auto si = static_cast<std::size_t>(bi);
        const auto sj = static_cast<std::size_t>(bj);
        out.merges.push_back({std::min(id[si], id[sj]), std::max(id[si], id[sj]), best, size[si] + size[sj]});

        // Stop relabelling once k clusters remain; the merge record continues.
        if (n - m > k) {
            for (auto& s : slot_of_point) {
                if (s == bj) s = bi;
            }
        }
        // Lance-Williams update for average linkage.
        const double wi = size[si];
        const double wj = size[sj];
        for (int h = 0; h < n; ++h) {
            if (!active[static_cast<std::size_t>(h)] || h == bi || h == bj) continue;
            D(bi, h) = D(h, bi) = (wi * D(bi, h) + wj * D(bj, h)) / (wi + wj);
        }
        size[si] += size[sj];
        id[si] = n + m;
        active[sj] = 0;
    }
    out.labels = relabel_by_first_appearance(slot_of_point);
    out.k = k;
    out.silhouette = silhouette_score(X, out.labels);
    return out;
}

ClusterAssignment dbscan(const Points& X, double eps, int min_pts) {
    check_points(X);
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (min_pts < 1) throw ConfigError("min_pts must be at least 1");
    const Eigen::Index n = X.rows();
    const Eigen::MatrixXd D = pairwise_distances(X);
    std::vector<std::vector<Eigen::Index>> nbrs(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (D(i, j) <= eps) nbrs[static_cast<std::size_t>(i)].push_back(j);
        }
    }
    auto is_core = [&](Eigen::Index i) { return static_cast<int>(nbrs[static_cast<std::size_t>(i)].size()) >= min_pts; };

    std::vector<int> labels(static_cast<std::size_t>(n), kNoise);
    int next = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] != kNoise || !is_core(i)) continue;
        const int c = next++;
        std::vector<Eigen::Index> stack{i};
        labels[static_cast<std::size_t>(i)] = c;
        while (!stack.empty()) {
            const Eigen::Index p = stack.back();
            stack.pop_back();
            if (!is_core(p)) continue;
            for (const auto q : nbrs[static_cast<std::size_t>(p)]) {
                if (labels[static_cast<std::size_t>(q)] != kNoise) continue;
                labels[static_cast<std::size_t>(q)] = c;
                stack.push_back(q);
            }
        }
    }
    ClusterAssignment out;
    out.labels = relabel_by_first_appearance(labels);
    out.k = next;
    out.silhouette = silhouette_score(X, out.labels);
    return out;
}

std::vector<double> kdistance(const Points& X, int k) {
    check_points(X);
    const Eigen::Index n = X.rows();
    if (k < 1 || k > n - 1) throw ConfigError("k must lie in [1, " + std::to_string(n - 1) + "]");
    const Eigen::MatrixXd D = pairwise_distances(X);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    std::vector<double> row;
    for (Eigen::Index i = 0; i < n; ++i) {
        row.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) row.push_back(D(i, j));
        }
        std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
        out.push_back(row[static_cast<std::size_t>(k - 1)]);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace dialnorm::sem
