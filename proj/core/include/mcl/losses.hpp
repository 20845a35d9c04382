#pragma once

#include "mcl/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcl::losses {

enum class Variant { WTA, RWTA, EWTA, DAC, AWTA };

std::string_view to_string(Variant variant);
/// Accepts "wta", "rwta", "ewta", "dac", "awta" (case-insensitive).
Variant parse_variant(std::string_view name);

/// One nonnegative cost per hypothesis (m^2).
using CostVector = std::vector<double>;

/// Assignment weights q_t over hypotheses. Always treated as constants by the
/// backward pass: nothing in this library differentiates through them.
struct AssignmentWeights {
    std::vector<double> values;
    Variant variant = Variant::WTA;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
};

struct LossConfig {
    Variant variant = Variant::AWTA;
    double epsilon = 0.05;     // RWTA
    double temperature = 1.0;  // aWTA
    std::size_t top_n = 1;     // EWTA
    std::size_t depth = 0;     // DAC
    double score_coefficient = 1.0;

    /// Range checks that depend on the head count K.
    void validate(std::size_t heads) const;
};

/// ceil(log2 K); the DAC depth at which every block is a single head.
std::size_t max_dac_depth(std::size_t heads);

/// Mean over steps of the squared Euclidean step residual.
double ade_cost(const Trajectory& prediction, const Trajectory& target);
CostVector cost_vector(const HypothesisSet& hypotheses, const Trajectory& target);

/// Index of the minimum cost; ties go to the lowest index.
std::size_t winner_index(std::span<const double> costs);

AssignmentWeights wta_weights(std::span<const double> costs);
/// Winner gets 1 - eps, every other head eps / (K - 1). Requires K >= 2 and
/// eps in (0, (K-1)/K].
AssignmentWeights rwta_weights(std::span<const double> costs, double epsilon);
/// Uniform 1/n over the n lowest-cost heads (stable order on ties).
AssignmentWeights ewta_weights(std::span<const double> costs, std::size_t top_n);
/// Uniform over the winner's block in the recursive-halving partition of
/// {0..K-1} into 2^depth contiguous blocks (first half takes the extra head).
AssignmentWeights dac_weights(std::span<const double> costs, std::size_t depth);
/// Boltzmann softmin exp(-cost/T)/Z, max-shifted so tiny T cannot overflow.
AssignmentWeights awta_weights(std::span<const double> costs, double temperature);

AssignmentWeights assignment_weights(std::span<const double> costs, const LossConfig& config);

/// Sum_k q_k * cost_k.
double weighted_loss(std::span<const double> costs, const AssignmentWeights& weights);

struct ScoreLoss {
    double value = 0.0;
    bool clamped = false; // winner probability was below 1e-12
};

/// Cross-entropy -log(scores[winner]) with the probability clamped at 1e-12.
ScoreLoss score_loss(std::span<const double> scores, std::size_t winner);

/// Per-sample composite objective: weighted regression term plus
/// score_coefficient * cross-entropy against the hard winner.
struct SampleObjective {
    double regression = 0.0;
    double score = 0.0;
    double total = 0.0;
    std::size_t winner = 0;
    bool score_clamped = false;
    AssignmentWeights weights;
};

SampleObjective sample_objective(const HypothesisSet& hypotheses, const Trajectory& target,
                                 const LossConfig& config, HypothesisGradient* grad = nullptr);

/// Same objective with the assignment weights and the winner supplied by the
/// caller (the stop-gradient view). `grad`, when given, is overwritten with
/// d(total)/d(outputs).
SampleObjective fixed_assignment_objective(const HypothesisSet& hypotheses,
                                           const Trajectory& target,
                                           const AssignmentWeights& weights, std::size_t winner,
                                           double score_coefficient,
                                           HypothesisGradient* grad = nullptr);

}  // namespace mcl::losses
