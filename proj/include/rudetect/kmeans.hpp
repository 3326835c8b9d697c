// kmeans.hpp — Lloyd's algorithm with K-means++ seeding, plus the
// proportion-constrained assignment used to force cluster sizes to match
// label proportions.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>
#include <vector>

#include "rudetect/common.hpp"

namespace rudetect {

struct ClusterResult {
    std::vector<int> assignments;
    Mat centroids;
    double objective = 0.0;       // sum of squared distances to assigned centroid
    Vec objective_history;        // one entry per Lloyd iteration
};

namespace kmeans_detail {

inline double sqdist(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

inline Mat kmeanspp_seed(const Mat& points, int K, std::mt19937& rng) {
    const std::size_t n = points.size();
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Mat centroids;
    centroids.push_back(points[static_cast<std::size_t>(uni(rng) * n) % n]);
    Vec d2(n);
    while (static_cast<int>(centroids.size()) < K) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sqdist(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double r = uni(rng) * total;
            for (; pick + 1 < n; ++pick) {
                r -= d2[pick];
                if (r <= 0.0) break;
            }
        } else {
            pick = static_cast<std::size_t>(uni(rng) * n) % n;  // all points coincide
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

}  // namespace kmeans_detail

inline ClusterResult kmeans(const Mat& points, int K, long long seed, int max_iter = 100) {
    if (K <= 0) throw DataError("kmeans: K must be positive");
    if (static_cast<int>(points.size()) < K) throw DataError("kmeans: need at least K points");
    std::seed_seq seq{seed};
    std::mt19937 rng(seq);

    ClusterResult res;
    res.centroids = kmeans_detail::kmeanspp_seed(points, K, rng);
    res.assignments.assign(points.size(), 0);
    const std::size_t dim = points[0].size();

    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        // Assignment step; ties go to the lower cluster id.
        bool moved = false;
        double objective = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            int best = 0;
            double best_d = kmeans_detail::sqdist(points[i], res.centroids[0]);
            for (int k = 1; k < K; ++k) {
                const double d = kmeans_detail::sqdist(points[i], res.centroids[k]);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            if (res.assignments[i] != best) {
                res.assignments[i] = best;
                moved = true;
            }
            objective += best_d;
        }
        if (objective > prev + 1e-9 * (1.0 + prev))
            throw NumericError("kmeans: objective increased");
        prev = objective;
        res.objective = objective;
        res.objective_history.push_back(objective);
        if (!moved && iter > 0) break;

        // Update step; an empty cluster is re-seeded to the point farthest
        // from its assigned centroid.
        Mat sums(K, Vec(dim, 0.0));
        std::vector<int> counts(K, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) sums[res.assignments[i]][d] += points[i][d];
            ++counts[res.assignments[i]];
        }
        for (int k = 0; k < K; ++k) {
            if (counts[k] > 0) {
                for (std::size_t d = 0; d < dim; ++d)
                    res.centroids[k][d] = sums[k][d] / counts[k];
            } else {
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    const double d =
                        kmeans_detail::sqdist(points[i], res.centroids[res.assignments[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                res.centroids[k] = points[far];
            }
        }
    }
    return res;
}

// Exact-quota greedy assignment: walk the globally sorted (distance, point,
// cluster) list and take the first free (point, unfilled cluster) pairs.
inline std::vector<int> constrained_assign(const Mat& points, const Mat& centroids,
                                           const std::vector<int>& quotas) {
    const int K = static_cast<int>(centroids.size());
    if (static_cast<int>(quotas.size()) != K)
        throw DataError("constrained_assign: quota count must match centroid count");
    long long quota_sum = 0;
    for (int q : quotas) {
        if (q < 0) throw DataError("constrained_assign: negative quota");
        quota_sum += q;
    }
    if (quota_sum != static_cast<long long>(points.size()))
        throw DataError("constrained_assign: quotas must sum to the point count");

    std::vector<std::tuple<double, std::size_t, int>> order;
    order.reserve(points.size() * K);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int k = 0; k < K; ++k)
            order.emplace_back(kmeans_detail::sqdist(points[i], centroids[k]), i, k);
    std::sort(order.begin(), order.end());

    std::vector<int> assignments(points.size(), -1), fill(K, 0);
    std::size_t placed = 0;
    for (const auto& [d, i, k] : order) {
        if (placed == points.size()) break;
        if (assignments[i] >= 0 || fill[k] >= quotas[k]) continue;
        assignments[i] = k;
        ++fill[k];
        ++placed;
    }
    return assignments;
}

}  // namespace rudetect
