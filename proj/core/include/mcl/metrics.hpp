#pragma once

#include "mcl/datagen.hpp"
#include "mcl/nn.hpp"
#include "mcl/postselect.hpp"
#include "mcl/types.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcl::metrics {

/// min over k of the mean unsquared step distance.
double min_ade(const HypothesisSet& hypotheses, const Trajectory& target);

struct FdeResult {
    double value = 0.0;
    std::size_t best_index = 0; // ties go to the lowest index
};

FdeResult min_fde(const HypothesisSet& hypotheses, const Trajectory& target);

/// Fraction of values strictly above `threshold`.
double miss_rate(std::span<const double> min_fdes, double threshold = 2.0);

/// minFDE + (1 - score of the minFDE hypothesis)^2.
double brier_fde(const HypothesisSet& hypotheses, const Trajectory& target);

/// Number of heads credited with at least `tau` of the scenes.
std::size_t effective_hypotheses(std::span<const std::size_t> winner_histogram,
                                 double tau = 0.01);

struct MetricsReport {
    std::size_t scenes = 0;
    double min_ade = 0.0;
    double min_fde = 0.0;
    double miss_rate = 0.0;
    double brier_fde = 0.0;
    std::size_t effective_hypotheses = 0;
    std::vector<std::size_t> winner_histogram;
};

struct EvaluationOptions {
    /// Hypotheses kept per scene; 0 keeps all of them. When fewer than the
    /// model emits, `nms` (or plain score truncation without it) reduces them.
    std::size_t top_k = 0;
    std::optional<postselect::NMSConfig> nms;
    double miss_threshold = 2.0;
    double tau = 0.01;
    /// The winner histogram credits a scene to the lowest-index head whose
    /// endpoint lies within this radius of the minFDE endpoint, so heads that
    /// sit on the same spot count once.
    double merge_radius = 0.0;
};

/// Maps normalized scene features to hypotheses in the same frame.
using Predictor = std::function<HypothesisSet(const data::Features&)>;

MetricsReport evaluate(const Predictor& predictor, std::span<const data::Scene> scenes,
                       const EvaluationOptions& options = {});
MetricsReport evaluate(const nn::ModelParams& model, std::span<const data::Scene> scenes,
                       const EvaluationOptions& options = {});

/// Stable CSV schema: scenes,min_ade,min_fde,miss_rate,brier_fde,effective_hypotheses
std::string csv_header();
std::string csv_row(const MetricsReport& report);

}  // namespace mcl::metrics
