#pragma once

#include "mcl/losses.hpp"
#include "mcl/nn.hpp"

#include <cstddef>
#include <span>

namespace mcl::nn {

struct GradientCheckOptions {
    double step = 1e-5;
    /// Denominator floor for the relative error |a - n| / max(|a|, |n|, floor),
    /// so coordinates with vanishing gradient are compared absolutely.
    double magnitude_floor = 1e-6;
};

struct GradientCheckReport {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    /// Coordinates whose +/-step perturbation flips the hard assignment
    /// (argmin ties); excluded from the comparison.
    std::size_t skipped = 0;
    bool tie_detected = false;
};

/// Compares the analytic gradient of the composite per-sample objective
/// (weighted regression + score cross-entropy) against central finite
/// differences. Assignment weights and the winner are frozen at the
/// unperturbed point, matching the stop-gradient contract.
GradientCheckReport gradient_check(const ModelParams& params, std::span<const double> context,
                                   const Trajectory& target, const losses::LossConfig& config,
                                   const GradientCheckOptions& options = {});

}  // namespace mcl::nn
