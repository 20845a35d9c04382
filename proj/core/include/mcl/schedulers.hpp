#pragma once

#include <cstddef>
#include <string_view>

namespace mcl::schedule {

enum class Kind { Exponential, Linear, EwtaTopN, DacDepth, Constant };

std::string_view to_string(Kind kind);
Kind parse_kind(std::string_view name);

/// Annealing state. `step` counts epochs.
struct ScheduleState {
    std::size_t step = 0;
    Kind kind = Kind::Exponential;
    double initial_temperature = 10.0; // T0
    double decay = 0.834;              // rho
    double floor_temperature = 1e-8;   // T_f
    std::size_t linear_span = 100;     // linear schedule reaches T_f at this step
    std::size_t total_steps = 100;     // run length for the EWTA/DAC segment schedules

    void validate() const;
};

/// max(T0 * rho^t, T_f).
double exp_temperature(const ScheduleState& state);
/// T0 * (1 - t/span) for t < span, T_f afterwards.
double linear_temperature(const ScheduleState& state);
/// Temperature for the exponential, linear and constant kinds.
double temperature(const ScheduleState& state);

/// Decreases from K to 1 over K equal segments of total_steps.
std::size_t ewta_topn(const ScheduleState& state, std::size_t heads);
/// Increases from 0 to ceil(log2 K) over ceil(log2 K)+1 equal segments.
std::size_t dac_depth(const ScheduleState& state, std::size_t heads);

}  // namespace mcl::schedule
