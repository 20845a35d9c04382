#pragma once

#include "mcl/sweep.hpp"
#include "mcl/training.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mcl::charts {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Bounds {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;
};

/// Data range over all series, widened to a nonzero span when degenerate.
Bounds data_bounds(const std::vector<Series>& series);

/// Self-contained SVG line chart. Output depends only on the arguments.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           bool log_y = false);

/// Writes training_loss.svg, schedule.svg, effective_hypotheses.svg,
/// min_ade.svg and records.csv. Returns the written paths.
std::vector<std::filesystem::path> emit_charts(const std::vector<EpochRecord>& records,
                                               const std::filesystem::path& dir);
/// Writes sweep_min_ade.svg, sweep_miss_rate.svg (one series per rho,
/// seeds averaged) and sweep.csv.
std::vector<std::filesystem::path> emit_sweep_charts(const std::vector<SweepRow>& rows,
                                                     const std::filesystem::path& dir);

}  // namespace mcl::charts
