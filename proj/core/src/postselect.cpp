#include "mcl/postselect.hpp"

#include "mcl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcl::postselect {

void NMSConfig::validate() const {
    if (select_count < 1) throw ConfigError("NMS selection count must be at least 1");
    if (!(radius >= 0.0)) throw ConfigError("NMS radius must be nonnegative");
}

std::vector<std::size_t> nms_indices(const HypothesisSet& hypotheses, const NMSConfig& config) {
    config.validate();
    const auto n = hypotheses.size();
    if (n == 0) throw InputError("hypothesis set is empty");
    if (hypotheses.scores.size() != n) throw InputError("scores and trajectories differ in count");
    if (hypotheses.horizon() == 0) throw InputError("hypotheses have no waypoints");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return hypotheses.scores[a] > hypotheses.scores[b];
    });

    const auto want = std::min(config.select_count, n);
    std::vector<std::size_t> kept;
    std::vector<std::size_t> suppressed;
    for (auto idx : order) {
        if (kept.size() == want) break;
        const auto& end = hypotheses.trajectories[idx].back();
        const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
            const auto& other = hypotheses.trajectories[k].back();
            return std::hypot(end.x - other.x, end.y - other.y) >= config.radius;
        });
        (clear ? kept : suppressed).push_back(idx);
    }
    for (auto idx : suppressed) {
        if (kept.size() == want) break;
        kept.push_back(idx);
    }
    return kept;
}

HypothesisSet nms_select(const HypothesisSet& hypotheses, const NMSConfig& config) {
    const auto picked = nms_indices(hypotheses, config);
    HypothesisSet out;
    double total = 0.0;
    for (auto idx : picked) {
        out.trajectories.push_back(hypotheses.trajectories[idx]);
        out.scores.push_back(hypotheses.scores[idx]);
        total += hypotheses.scores[idx];
    }
    for (auto& s : out.scores) {
        s = total > 0.0 ? s / total : 1.0 / static_cast<double>(picked.size());
    }
    out.score_logits.reserve(out.scores.size());
    for (double s : out.scores) out.score_logits.push_back(std::log(s));
    return out;
}

}  // namespace mcl::postselect
