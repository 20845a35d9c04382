#pragma once

#include <cstddef>
#include <vector>

namespace mcl {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Ordered 2D waypoints in meters at a fixed timestep.
using Trajectory = std::vector<Point2>;

/// K predicted trajectories plus their confidence scores (softmax of the
/// logits). All trajectories share the same horizon.
struct HypothesisSet {
    std::vector<Trajectory> trajectories;
    std::vector<double> score_logits;
    std::vector<double> scores;

    std::size_t size() const noexcept { return trajectories.size(); }
    std::size_t horizon() const noexcept {
        return trajectories.empty() ? 0 : trajectories.front().size();
    }
};

/// Gradient of a scalar loss with respect to the raw network outputs of one
/// sample, shaped like a HypothesisSet (trajectories plus score logits).
struct HypothesisGradient {
    std::vector<Trajectory> d_trajectories;
    std::vector<double> d_logits;

    static HypothesisGradient zeros(std::size_t heads, std::size_t horizon) {
        return {std::vector<Trajectory>(heads, Trajectory(horizon)),
                std::vector<double>(heads, 0.0)};
    }
};

}  // namespace mcl
