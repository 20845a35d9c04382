#include "mcl/metrics.hpp"

#include "mcl/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace mcl::metrics {

namespace {

void check_shapes(const HypothesisSet& hypotheses, const Trajectory& target) {
    if (hypotheses.size() == 0) throw InputError("hypothesis set is empty");
    if (target.empty()) throw InputError("target trajectory is empty");
    for (const auto& t : hypotheses.trajectories) {
        if (t.size() != target.size()) {
            throw InputError("horizon mismatch: hypothesis has " + std::to_string(t.size()) +
                             " steps, target " + std::to_string(target.size()));
        }
    }
}

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

HypothesisSet reduce(const HypothesisSet& hyps, const EvaluationOptions& options) {
    if (options.top_k == 0 || options.top_k == hyps.size()) return hyps;
    if (options.top_k > hyps.size()) {
        throw InputError("top_k " + std::to_string(options.top_k) + " exceeds the " +
                         std::to_string(hyps.size()) + " available hypotheses");
    }
    auto nms = options.nms.value_or(postselect::NMSConfig{options.top_k, 0.0});
    nms.select_count = options.top_k;
    return postselect::nms_select(hyps, nms);
}

}  // namespace

double min_ade(const HypothesisSet& hypotheses, const Trajectory& target) {
    check_shapes(hypotheses, target);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& traj : hypotheses.trajectories) {
        double sum = 0.0;
        for (std::size_t j = 0; j < target.size(); ++j) sum += distance(traj[j], target[j]);
        best = std::min(best, sum / static_cast<double>(target.size()));
    }
    return best;
}

FdeResult min_fde(const HypothesisSet& hypotheses, const Trajectory& target) {
    check_shapes(hypotheses, target);
    FdeResult r{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < hypotheses.size(); ++k) {
        const double d = distance(hypotheses.trajectories[k].back(), target.back());
        if (d < r.value) r = {d, k};
    }
    return r;
}

double miss_rate(std::span<const double> min_fdes, double threshold) {
    if (min_fdes.empty()) throw InputError("miss rate needs at least one value");
    std::size_t misses = 0;
    for (double v : min_fdes) misses += v > threshold ? 1 : 0;
    return static_cast<double>(misses) / static_cast<double>(min_fdes.size());
}

double brier_fde(const HypothesisSet& hypotheses, const Trajectory& target) {
    const auto fde = min_fde(hypotheses, target);
    if (hypotheses.scores.size() != hypotheses.size()) {
        throw InputError("scores and trajectories differ in count");
    }
    const double miss = 1.0 - hypotheses.scores[fde.best_index];
    return fde.value + miss * miss;
}

std::size_t effective_hypotheses(std::span<const std::size_t> winner_histogram, double tau) {
    std::size_t total = 0;
    for (auto c : winner_histogram) total += c;
    if (total == 0) return 0;
    std::size_t n = 0;
    for (auto c : winner_histogram) {
        if (static_cast<double>(c) >= tau * static_cast<double>(total)) ++n;
    }
    return n;
}

MetricsReport evaluate(const Predictor& predictor, std::span<const data::Scene> scenes,
                       const EvaluationOptions& options) {
    if (scenes.empty()) throw InputError("cannot evaluate an empty dataset");
    MetricsReport report;
    std::vector<double> fdes;
    fdes.reserve(scenes.size());
    double ade_sum = 0.0;
    double brier_sum = 0.0;
    for (const auto& scene : scenes) {
        const auto features = data::featurize(scene);
        const auto hyps = reduce(predictor(features), options);
        const auto& target = features.target;
        const auto fde = min_fde(hyps, target);
        ade_sum += min_ade(hyps, target);
        brier_sum += brier_fde(hyps, target);
        fdes.push_back(fde.value);

        if (report.winner_histogram.empty()) report.winner_histogram.assign(hyps.size(), 0);
        if (report.winner_histogram.size() != hyps.size()) {
            throw InputError("predictor changed its hypothesis count between scenes");
        }
        std::size_t credited = fde.best_index;
        const auto& best_end = hyps.trajectories[fde.best_index].back();
        for (std::size_t k = 0; k < fde.best_index; ++k) {
            if (distance(hyps.trajectories[k].back(), best_end) <= options.merge_radius) {
                credited = k;
                break;
            }
        }
        ++report.winner_histogram[credited];
    }
    const double n = static_cast<double>(scenes.size());
    report.scenes = scenes.size();
    report.min_ade = ade_sum / n;
    report.min_fde = 0.0;
    for (double v : fdes) report.min_fde += v;
    report.min_fde /= n;
    report.miss_rate = miss_rate(fdes, options.miss_threshold);
    report.brier_fde = brier_sum / n;
    report.effective_hypotheses = effective_hypotheses(report.winner_histogram, options.tau);
    return report;
}

MetricsReport evaluate(const nn::ModelParams& model, std::span<const data::Scene> scenes,
                       const EvaluationOptions& options) {
    if (scenes.empty()) throw InputError("cannot evaluate an empty dataset");
    // One batched forward pass; the predictor then replays columns in order.
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(model.input_width()),
                           static_cast<Eigen::Index>(scenes.size()));
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto f = data::featurize(scenes[i]);
        if (f.context.size() != model.input_width()) {
            throw ConfigError("scene context width " + std::to_string(f.context.size()) +
                              " does not match model input width " +
                              std::to_string(model.input_width()));
        }
        if (f.target.size() != model.horizon()) {
            throw ConfigError("scene horizon " + std::to_string(f.target.size()) +
                              " does not match model horizon " + std::to_string(model.horizon()));
        }
        inputs.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(f.context.data(), static_cast<Eigen::Index>(f.context.size()));
    }
    const Eigen::MatrixXd outputs = nn::forward_batch(model, inputs);
    std::size_t next = 0;
    auto predictor = [&](const data::Features&) {
        const auto col = static_cast<Eigen::Index>(next++);
        return nn::decode_output({outputs.col(col).data(), static_cast<std::size_t>(outputs.rows())},
                                 model.heads(), model.horizon());
    };
    return evaluate(predictor, scenes, options);
}

std::string csv_header() {
    return "scenes,min_ade,min_fde,miss_rate,brier_fde,effective_hypotheses";
}

std::string csv_row(const MetricsReport& r) {
    return fmt::format("{},{},{},{},{},{}", r.scenes, r.min_ade, r.min_fde, r.miss_rate,
                       r.brier_fde, r.effective_hypotheses);
}

}  // namespace mcl::metrics
