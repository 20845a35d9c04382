#include "mcl/gradient_check.hpp"

#include <algorithm>
#include <cmath>

namespace mcl::nn {

namespace {

bool hard_assignment(losses::Variant v) { return v != losses::Variant::AWTA; }

}  // namespace

GradientCheckReport gradient_check(const ModelParams& params, std::span<const double> context,
                                   const Trajectory& target, const losses::LossConfig& config,
                                   const GradientCheckOptions& options) {
    const auto base = forward(params, context);
    const auto costs = losses::cost_vector(base, target);
    const auto weights = losses::assignment_weights(costs, config);
    const auto winner = losses::winner_index(costs);

    HypothesisGradient upstream;
    losses::fixed_assignment_objective(base, target, weights, winner, config.score_coefficient,
                                       &upstream);
    const auto analytic = backward(params, context, upstream);

    auto frozen_loss = [&](const HypothesisSet& h) {
        return losses::fixed_assignment_objective(h, target, weights, winner,
                                                  config.score_coefficient)
            .total;
    };
    // True when the perturbed point would be assigned differently.
    auto flips = [&](const HypothesisSet& h) {
        const auto c = losses::cost_vector(h, target);
        if (losses::winner_index(c) != winner) return true;
        return hard_assignment(config.variant) &&
               losses::assignment_weights(c, config).values != weights.values;
    };

    GradientCheckReport report;
    ModelParams probe = params;
    for (std::size_t i = 0; i < params.parameter_count(); ++i) {
        const double original = probe.parameter(i);
        probe.parameter(i) = original + options.step;
        const auto plus = forward(probe, context);
        probe.parameter(i) = original - options.step;
        const auto minus = forward(probe, context);
        probe.parameter(i) = original;

        if (flips(plus) || flips(minus)) {
            ++report.skipped;
            continue;
        }
        const double numeric = (frozen_loss(plus) - frozen_loss(minus)) / (2.0 * options.step);
        const double exact = analytic.parameter(i);
        const double denom =
            std::max({std::abs(numeric), std::abs(exact), options.magnitude_floor});
        report.max_relative_error =
            std::max(report.max_relative_error, std::abs(numeric - exact) / denom);
        ++report.checked;
    }
    report.tie_detected = report.skipped > 0;
    return report;
}

}  // namespace mcl::nn
