#include "mcl/losses.hpp"

#include "mcl/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace mcl::losses {

namespace {

constexpr double kMinProbability = 1e-12;

void require_nonempty(std::span<const double> costs) {
    if (costs.empty()) throw InputError("cost vector is empty");
}

// Recursive halving of [lo, hi); returns the block holding `index`.
std::pair<std::size_t, std::size_t> dac_block(std::size_t lo, std::size_t hi, std::size_t depth,
                                              std::size_t index) {
    while (depth > 0 && hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (index < mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        --depth;
    }
    return {lo, hi};
}

}  // namespace

std::string_view to_string(Variant variant) {
    switch (variant) {
        case Variant::WTA: return "wta";
        case Variant::RWTA: return "rwta";
        case Variant::EWTA: return "ewta";
        case Variant::DAC: return "dac";
        case Variant::AWTA: return "awta";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto v : {Variant::WTA, Variant::RWTA, Variant::EWTA, Variant::DAC, Variant::AWTA}) {
        if (lower == to_string(v)) return v;
    }
    throw ConfigError("unknown loss variant '" + std::string(name) + "'");
}

std::size_t max_dac_depth(std::size_t heads) {
    std::size_t depth = 0;
    while ((std::size_t{1} << depth) < heads) ++depth;
    return depth;
}

void LossConfig::validate(std::size_t heads) const {
    if (heads == 0) throw ConfigError("loss needs at least one head");
    if (!(score_coefficient >= 0.0) || !std::isfinite(score_coefficient)) {
        throw ConfigError("score coefficient must be finite and nonnegative");
    }
    switch (variant) {
        case Variant::WTA: break;
        case Variant::RWTA: {
            if (heads < 2) throw ConfigError("RWTA needs at least two heads");
            const double upper = static_cast<double>(heads - 1) / static_cast<double>(heads);
            if (!(epsilon > 0.0 && epsilon <= upper)) {
                throw ConfigError("RWTA epsilon must lie in (0, (K-1)/K]");
            }
            break;
        }
        case Variant::EWTA:
            if (top_n < 1 || top_n > heads) throw ConfigError("EWTA top-n must lie in [1, K]");
            break;
        case Variant::DAC:
            if (depth > max_dac_depth(heads)) throw ConfigError("DAC depth exceeds ceil(log2 K)");
            break;
        case Variant::AWTA:
            if (!(temperature > 0.0)) throw ConfigError("aWTA temperature must be positive");
            break;
    }
}

double ade_cost(const Trajectory& prediction, const Trajectory& target) {
    if (target.empty()) throw InputError("trajectory must have at least one step");
    if (prediction.size() != target.size()) {
        throw InputError("trajectory length mismatch: " + std::to_string(prediction.size()) +
                         " vs " + std::to_string(target.size()));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j) {
        const double dx = prediction[j].x - target[j].x;
        const double dy = prediction[j].y - target[j].y;
        sum += dx * dx + dy * dy;
    }
    return sum / static_cast<double>(target.size());
}

CostVector cost_vector(const HypothesisSet& hypotheses, const Trajectory& target) {
    if (hypotheses.size() == 0) throw InputError("hypothesis set is empty");
    CostVector costs;
    costs.reserve(hypotheses.size());
    for (const auto& traj : hypotheses.trajectories) costs.push_back(ade_cost(traj, target));
    return costs;
}

std::size_t winner_index(std::span<const double> costs) {
    require_nonempty(costs);
    std::size_t best = 0;
    for (std::size_t k = 1; k < costs.size(); ++k) {
        if (costs[k] < costs[best]) best = k;
    }
    return best;
}

AssignmentWeights wta_weights(std::span<const double> costs) {
    AssignmentWeights w{std::vector<double>(costs.size(), 0.0), Variant::WTA};
    w.values[winner_index(costs)] = 1.0;
    return w;
}

AssignmentWeights rwta_weights(std::span<const double> costs, double epsilon) {
    require_nonempty(costs);
    const auto heads = costs.size();
    if (heads < 2) throw InputError("RWTA is undefined for a single hypothesis");
    const double upper = static_cast<double>(heads - 1) / static_cast<double>(heads);
    if (!(epsilon > 0.0 && epsilon <= upper)) {
        throw InputError("RWTA epsilon must lie in (0, (K-1)/K]");
    }
    AssignmentWeights w{std::vector<double>(heads, epsilon / static_cast<double>(heads - 1)),
                        Variant::RWTA};
    w.values[winner_index(costs)] = 1.0 - epsilon;
    return w;
}

AssignmentWeights ewta_weights(std::span<const double> costs, std::size_t top_n) {
    require_nonempty(costs);
    const auto heads = costs.size();
    if (top_n < 1 || top_n > heads) throw InputError("EWTA top-n must lie in [1, K]");
    std::vector<std::size_t> order(heads);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    AssignmentWeights w{std::vector<double>(heads, 0.0), Variant::EWTA};
    const double share = 1.0 / static_cast<double>(top_n);
    for (std::size_t i = 0; i < top_n; ++i) w.values[order[i]] = share;
    return w;
}

AssignmentWeights dac_weights(std::span<const double> costs, std::size_t depth) {
    require_nonempty(costs);
    const auto heads = costs.size();
    if (depth > max_dac_depth(heads)) throw InputError("DAC depth exceeds ceil(log2 K)");
    const auto [lo, hi] = dac_block(0, heads, depth, winner_index(costs));
    AssignmentWeights w{std::vector<double>(heads, 0.0), Variant::DAC};
    const double share = 1.0 / static_cast<double>(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) w.values[k] = share;
    return w;
}

AssignmentWeights awta_weights(std::span<const double> costs, double temperature) {
    require_nonempty(costs);
    if (!(temperature > 0.0)) throw InputError("aWTA temperature must be positive");
    const double best = *std::min_element(costs.begin(), costs.end());
    AssignmentWeights w{std::vector<double>(costs.size()), Variant::AWTA};
    double z = 0.0;
    for (std::size_t k = 0; k < costs.size(); ++k) {
        w.values[k] = std::exp(-(costs[k] - best) / temperature);
        z += w.values[k];
    }
    for (auto& v : w.values) v /= z;
    return w;
}

AssignmentWeights assignment_weights(std::span<const double> costs, const LossConfig& config) {
    switch (config.variant) {
        case Variant::WTA: return wta_weights(costs);
        case Variant::RWTA: return rwta_weights(costs, config.epsilon);
        case Variant::EWTA: return ewta_weights(costs, config.top_n);
        case Variant::DAC: return dac_weights(costs, config.depth);
        case Variant::AWTA: return awta_weights(costs, config.temperature);
    }
    throw ConfigError("unknown loss variant");
}

double weighted_loss(std::span<const double> costs, const AssignmentWeights& weights) {
    if (costs.size() != weights.size()) {
        throw InputError("cost and weight vectors differ in length");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < costs.size(); ++k) sum += weights[k] * costs[k];
    return sum;
}

ScoreLoss score_loss(std::span<const double> scores, std::size_t winner) {
    if (winner >= scores.size()) throw InputError("winner index out of range");
    const double p = scores[winner];
    if (p < kMinProbability) return {-std::log(kMinProbability), true};
    return {-std::log(p), false};
}

SampleObjective fixed_assignment_objective(const HypothesisSet& hypotheses,
                                           const Trajectory& target,
                                           const AssignmentWeights& weights, std::size_t winner,
                                           double score_coefficient, HypothesisGradient* grad) {
    const auto costs = cost_vector(hypotheses, target);
    SampleObjective obj;
    obj.weights = weights;
    obj.winner = winner;
    obj.regression = weighted_loss(costs, weights);
    const auto sl = score_loss(hypotheses.scores, winner);
    obj.score = sl.value;
    obj.score_clamped = sl.clamped;
    obj.total = obj.regression + score_coefficient * obj.score;

    if (grad) {
        const auto heads = hypotheses.size();
        const auto horizon = target.size();
        *grad = HypothesisGradient::zeros(heads, horizon);
        const double per_step = 2.0 / static_cast<double>(horizon);
        for (std::size_t k = 0; k < heads; ++k) {
            const double q = weights[k];
            if (q == 0.0) continue;
            for (std::size_t j = 0; j < horizon; ++j) {
                grad->d_trajectories[k][j] = {
                    q * per_step * (hypotheses.trajectories[k][j].x - target[j].x),
                    q * per_step * (hypotheses.trajectories[k][j].y - target[j].y)};
            }
        }
        // d(-log softmax_w)/d logit_k = p_k - [k == w]; zero when the clamp is active.
        if (!sl.clamped) {
            for (std::size_t k = 0; k < heads; ++k) {
                grad->d_logits[k] =
                    score_coefficient * (hypotheses.scores[k] - (k == winner ? 1.0 : 0.0));
            }
        }
    }
    return obj;
}

SampleObjective sample_objective(const HypothesisSet& hypotheses, const Trajectory& target,
                                 const LossConfig& config, HypothesisGradient* grad) {
    const auto costs = cost_vector(hypotheses, target);
    const auto weights = assignment_weights(costs, config);
    return fixed_assignment_objective(hypotheses, target, weights, winner_index(costs),
                                      config.score_coefficient, grad);
}

}  // namespace mcl::losses
