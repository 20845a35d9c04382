#pragma once

// Test-side reference implementations. Written independently of the library
// (plain loops, no shared helpers) so agreement means something.

#include "mcl/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

struct Metrics {
    double min_ade = 0.0;
    double min_fde = 0.0;
    std::size_t fde_index = 0;
    double brier_fde = 0.0;
};

inline Metrics brute_metrics(const mcl::HypothesisSet& h, const mcl::Trajectory& y) {
    Metrics m;
    m.min_ade = std::numeric_limits<double>::infinity();
    m.min_fde = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < h.trajectories.size(); ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            sum += std::hypot(h.trajectories[k][j].x - y[j].x, h.trajectories[k][j].y - y[j].y);
        }
        m.min_ade = std::min(m.min_ade, sum / static_cast<double>(y.size()));
        const double fde = std::hypot(h.trajectories[k].back().x - y.back().x,
                                      h.trajectories[k].back().y - y.back().y);
        if (fde < m.min_fde) {
            m.min_fde = fde;
            m.fde_index = k;
        }
    }
    const double miss = 1.0 - h.scores[m.fde_index];
    m.brier_fde = m.min_fde + miss * miss;
    return m;
}

inline double brute_miss_rate(const std::vector<double>& fdes, double threshold) {
    std::size_t misses = 0;
    for (double v : fdes) misses += v > threshold ? 1 : 0;
    return static_cast<double>(misses) / static_cast<double>(fdes.size());
}

/// Mean squared distance from each point to its nearest center.
inline double quantization_error(const std::vector<mcl::Point2>& points,
                                 const std::vector<mcl::Point2>& centers) {
    double total = 0.0;
    for (const auto& p : points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) {
            const double dx = p.x - c.x;
            const double dy = p.y - c.y;
            best = std::min(best, dx * dx + dy * dy);
        }
        total += best;
    }
    return total / static_cast<double>(points.size());
}

/// Lloyd's algorithm with k-means++ seeding, best of `restarts`.
inline std::vector<mcl::Point2> kmeans(const std::vector<mcl::Point2>& points, std::size_t k,
                                       std::size_t restarts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<mcl::Point2> best_centers;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<mcl::Point2> centers;
        std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
        centers.push_back(points[pick(rng)]);
        while (centers.size() < k) {
            std::vector<double> d2(points.size());
            for (std::size_t i = 0; i < points.size(); ++i) {
                double m = std::numeric_limits<double>::infinity();
                for (const auto& c : centers) {
                    m = std::min(m, std::pow(points[i].x - c.x, 2) + std::pow(points[i].y - c.y, 2));
                }
                d2[i] = m;
            }
            std::discrete_distribution<std::size_t> next(d2.begin(), d2.end());
            centers.push_back(points[next(rng)]);
        }
        for (int iter = 0; iter < 200; ++iter) {
            std::vector<mcl::Point2> sums(k);
            std::vector<std::size_t> counts(k, 0);
            for (const auto& p : points) {
                std::size_t arg = 0;
                double m = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < k; ++c) {
                    const double d = std::pow(p.x - centers[c].x, 2) + std::pow(p.y - centers[c].y, 2);
                    if (d < m) {
                        m = d;
                        arg = c;
                    }
                }
                sums[arg].x += p.x;
                sums[arg].y += p.y;
                ++counts[arg];
            }
            bool moved = false;
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] == 0) continue;
                const mcl::Point2 next{sums[c].x / static_cast<double>(counts[c]),
                                       sums[c].y / static_cast<double>(counts[c])};
                moved = moved || next.x != centers[c].x || next.y != centers[c].y;
                centers[c] = next;
            }
            if (!moved) break;
        }
        const double err = quantization_error(points, centers);
        if (err < best_err) {
            best_err = err;
            best_centers = centers;
        }
    }
    return best_centers;
}

}  // namespace oracle
