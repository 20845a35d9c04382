#pragma once

#include "mcl/types.hpp"

#include <cstddef>
#include <vector>

namespace mcl::postselect {

struct NMSConfig {
    std::size_t select_count = 6; // K_out
    double radius = 2.0;          // endpoint suppression radius, meters

    void validate() const;
};

/// Greedy endpoint non-maximum suppression. Hypotheses are visited by
/// descending score (ties to the lower index) and kept when their endpoint
/// lies at least `radius` from every kept endpoint. Shortfalls are
/// backfilled with the best suppressed hypotheses, so the output holds
/// min(K_out, K) hypotheses. Scores are renormalized over the selection.
HypothesisSet nms_select(const HypothesisSet& hypotheses, const NMSConfig& config);

/// Indices (into the input) chosen by nms_select, in output order.
std::vector<std::size_t> nms_indices(const HypothesisSet& hypotheses, const NMSConfig& config);

}  // namespace mcl::postselect
