#include "mcl/schedulers.hpp"

#include "mcl/error.hpp"
#include "mcl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mcl::schedule {

namespace {

void require_temperature(const ScheduleState& s) {
    if (!(s.initial_temperature > 0.0) || !std::isfinite(s.initial_temperature)) {
        throw ConfigError("initial temperature must be positive and finite");
    }
    if (!(s.floor_temperature > 0.0)) throw ConfigError("floor temperature must be positive");
}

}  // namespace

std::string_view to_string(Kind kind) {
    switch (kind) {
        case Kind::Exponential: return "exponential";
        case Kind::Linear: return "linear";
        case Kind::EwtaTopN: return "ewta-topn";
        case Kind::DacDepth: return "dac-depth";
        case Kind::Constant: return "constant";
    }
    return "unknown";
}

Kind parse_kind(std::string_view name) {
    for (auto k : {Kind::Exponential, Kind::Linear, Kind::EwtaTopN, Kind::DacDepth,
                   Kind::Constant}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown scheduler kind '" + std::string(name) + "'");
}

void ScheduleState::validate() const {
    switch (kind) {
        case Kind::Exponential:
            require_temperature(*this);
            if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("decay rho must lie in (0, 1)");
            break;
        case Kind::Linear:
            require_temperature(*this);
            if (linear_span == 0) throw ConfigError("linear span must be positive");
            break;
        case Kind::Constant: require_temperature(*this); break;
        case Kind::EwtaTopN:
        case Kind::DacDepth:
            if (total_steps == 0) throw ConfigError("total steps must be positive");
            break;
    }
}

double exp_temperature(const ScheduleState& state) {
    require_temperature(state);
    if (!(state.decay > 0.0 && state.decay < 1.0)) {
        throw ConfigError("decay rho must lie in (0, 1)");
    }
    const double t = state.initial_temperature *
                     std::pow(state.decay, static_cast<double>(state.step));
    return std::max(t, state.floor_temperature);
}

double linear_temperature(const ScheduleState& state) {
    require_temperature(state);
    if (state.linear_span == 0) throw ConfigError("linear span must be positive");
    if (state.step >= state.linear_span) return state.floor_temperature;
    const double frac =
        static_cast<double>(state.step) / static_cast<double>(state.linear_span);
    return std::max(state.initial_temperature * (1.0 - frac), state.floor_temperature);
}

double temperature(const ScheduleState& state) {
    switch (state.kind) {
        case Kind::Exponential: return exp_temperature(state);
        case Kind::Linear: return linear_temperature(state);
        case Kind::Constant:
            require_temperature(state);
            return state.initial_temperature;
        case Kind::EwtaTopN:
        case Kind::DacDepth: break;
    }
    throw ConfigError("scheduler kind '" + std::string(to_string(state.kind)) +
                      "' has no temperature");
}

std::size_t ewta_topn(const ScheduleState& state, std::size_t heads) {
    if (heads == 0) throw ConfigError("EWTA schedule needs at least one head");
    if (state.total_steps == 0) throw ConfigError("total steps must be positive");
    const std::size_t segment = state.step * heads / state.total_steps;
    return segment >= heads ? 1 : std::max<std::size_t>(1, heads - segment);
}

std::size_t dac_depth(const ScheduleState& state, std::size_t heads) {
    if (heads == 0) throw ConfigError("DAC schedule needs at least one head");
    if (state.total_steps == 0) throw ConfigError("total steps must be positive");
    const std::size_t deepest = losses::max_dac_depth(heads);
    const std::size_t segment = state.step * (deepest + 1) / state.total_steps;
    return std::min(deepest, segment);
}

}  // namespace mcl::schedule
