#pragma once

#include "mcl/config.hpp"
#include "mcl/metrics.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mcl {

struct SweepGrid {
    std::vector<double> initial_temperatures;
    std::vector<double> decays;
    std::vector<std::uint64_t> seeds;

    std::size_t size() const noexcept {
        return initial_temperatures.size() * decays.size() * seeds.size();
    }
};

struct SweepRow {
    double initial_temperature = 0.0;
    double decay = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error; // set when the cell failed
    metrics::MetricsReport report; // best-minFDE checkpoint on validation
};

/// Trains and evaluates one cell per (T0, rho, seed), in that nesting order.
/// Cells share nothing; up to `threads` run at once. A failing cell is
/// recorded and the sweep continues.
std::vector<SweepRow> sweep(const ExperimentConfig& base, const SweepGrid& grid,
                            std::size_t threads = 1);

/// Stable schema: initial_temperature,decay,seed,status,min_ade,min_fde,
/// miss_rate,brier_fde,effective_hypotheses
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

}  // namespace mcl
