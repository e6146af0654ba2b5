#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace dialnorm::sem {

/// Rows are points.
using Points = Eigen::MatrixXd;

constexpr int kNoise = -1;

/// One agglomerative merge. Leaves are 0..n-1; the cluster made by merge m
/// gets id n + m.
struct Merge {
    int left = 0;
    int right = 0;
    double distance = 0.0;
    int size = 0;
};

struct ClusterAssignment {
    /// labels[i] is the cluster of point i, dense in 0..k-1 in order of
    /// first appearance; DBSCAN noise is kNoise.
    std::vector<int> labels;
    int k = 0;
    double inertia = 0.0;
    /// k-means: inertia after each assignment step of the winning restart,
    /// then the inertia at the final centroids.
    std::vector<double> inertia_trace;
    std::vector<Merge> merges;
    /// Mean silhouette over non-noise points; 0 when undefined.
    double silhouette = 0.0;
};

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 300;
};

/// Lloyd's algorithm with k-means++ seeding; keeps the restart with the
/// lowest inertia (the earliest on ties). Throws ConfigError unless 1 <= k <= n.
ClusterAssignment kmeans(const Points& X, int k, std::uint64_t seed, KMeansOptions opts = {});

/// Per-point silhouette with Euclidean distance. Points in singleton
/// clusters score 0; noise points are excluded and reported as 0.
std::vector<double> silhouette_samples(const Points& X, const std::vector<int>& labels);
double silhouette_score(const Points& X, const std::vector<int>& labels);

struct SilhouetteScan {
    std::vector<int> ks;
    std::vector<double> scores;
    int best_k = 0;
};

/// k-means for each k in [k_lo, k_hi]; every k must satisfy 2 <= k <= n-1.
SilhouetteScan silhouette_scan(const Points& X, int k_lo, int k_hi, std::uint64_t seed, KMeansOptions opts = {});

/// Average linkage, Euclidean. Ties go to the lexicographically smallest
/// pair of active cluster slots.
ClusterAssignment agglomerative(const Points& X, int k);

/// A point is core when at least `min_pts` points (itself included) lie
/// within `eps`. Clusters are numbered in order of their lowest index.
ClusterAssignment dbscan(const Points& X, double eps, int min_pts);

/// Distance from each point to its k-th nearest other point, descending.
std::vector<double> kdistance(const Points& X, int k);

}  // namespace dialnorm::sem
