#include "mcl/error.hpp"
#include "mcl/losses.hpp"
#include "mcl/schedulers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mcl;
using namespace mcl::schedule;

namespace {

ScheduleState at(std::size_t step, Kind kind = Kind::Exponential) {
    ScheduleState s;
    s.kind = kind;
    s.step = step;
    return s;
}

}  // namespace

TEST(ExpTemperature, Examples) {
    EXPECT_EQ(exp_temperature(at(0)), 10.0);
    EXPECT_NEAR(exp_temperature(at(1)), 8.34, 1e-12);
    EXPECT_EQ(exp_temperature(at(10000)), 1e-8);
    EXPECT_NEAR(exp_temperature(at(7)), 10.0 * std::pow(0.834, 7), 1e-12);
}

TEST(ExpTemperature, MonotoneAndFloored) {
    double prev = exp_temperature(at(0));
    for (std::size_t t = 1; t < 300; ++t) {
        const double v = exp_temperature(at(t));
        EXPECT_LE(v, prev);
        EXPECT_GE(v, 1e-8);
        prev = v;
    }
}

TEST(LinearTemperature, Examples) {
    auto s = at(0, Kind::Linear);
    s.initial_temperature = 8.0;
    EXPECT_EQ(linear_temperature(s), 8.0);
    s.step = 50;
    EXPECT_DOUBLE_EQ(linear_temperature(s), 4.0);
    s.step = 100;
    EXPECT_EQ(linear_temperature(s), 1e-8);
    s.step = 250;
    EXPECT_EQ(linear_temperature(s), 1e-8);
}

TEST(Temperature, DispatchesByKind) {
    EXPECT_EQ(temperature(at(3)), exp_temperature(at(3)));
    EXPECT_EQ(temperature(at(3, Kind::Linear)), linear_temperature(at(3, Kind::Linear)));
    EXPECT_EQ(temperature(at(40, Kind::Constant)), 10.0);
    EXPECT_THROW(temperature(at(0, Kind::EwtaTopN)), ConfigError);
}

TEST(EwtaTopN, Segments) {
    auto s = at(0, Kind::EwtaTopN);
    s.total_steps = 60;
    EXPECT_EQ(ewta_topn(s, 6), 6u);
    s.step = 25;
    EXPECT_EQ(ewta_topn(s, 6), 4u);
    s.step = 59;
    EXPECT_EQ(ewta_topn(s, 6), 1u);
    s.step = 500;
    EXPECT_EQ(ewta_topn(s, 6), 1u);
    std::size_t prev = 6;
    for (std::size_t t = 0; t < 60; ++t) {
        s.step = t;
        const auto n = ewta_topn(s, 6);
        EXPECT_LE(n, prev);
        EXPECT_EQ(n, 6 - (t * 6) / 60);
        prev = n;
    }
}

TEST(DacDepth, Segments) {
    auto s = at(0, Kind::DacDepth);
    s.total_steps = 40;
    EXPECT_EQ(dac_depth(s, 4), 0u);
    s.step = 15;
    EXPECT_EQ(dac_depth(s, 4), 1u);
    s.total_steps = 60;
    s.step = 59;
    EXPECT_EQ(dac_depth(s, 6), 3u);
    EXPECT_EQ(dac_depth(s, 6), losses::max_dac_depth(6));
    s.step = 1000;
    EXPECT_EQ(dac_depth(s, 6), 3u);
}

TEST(ScheduleState, Validation) {
    auto s = at(0);
    s.decay = 1.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = at(0);
    s.initial_temperature = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = at(0, Kind::Linear);
    s.linear_span = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    EXPECT_EQ(parse_kind("ewta-topn"), Kind::EwtaTopN);
    EXPECT_EQ(to_string(Kind::DacDepth), "dac-depth");
    EXPECT_THROW(parse_kind("cosine"), ConfigError);
}
