#include "mcl/error.hpp"
#include "mcl/losses.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace mcl;
using namespace mcl::losses;

namespace {

Trajectory line(std::size_t n, double dx, double dy) {
    Trajectory t;
    for (std::size_t i = 0; i < n; ++i) t.push_back({dx * static_cast<double>(i), dy * static_cast<double>(i)});
    return t;
}

void expect_values(const AssignmentWeights& w, std::vector<double> expected, double tol = 1e-12) {
    ASSERT_EQ(w.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(w[k], expected[k], tol) << "k=" << k;
}

}  // namespace

TEST(AdeCost, IdentityIsZero) {
    const auto t = line(5, 0.3, -1.2);
    EXPECT_EQ(ade_cost(t, t), 0.0);
}

TEST(AdeCost, HandResiduals) {
    Trajectory target = {{0, 0}, {1, 1}};
    Trajectory pred = {{3, 4}, {1, 1}};
    EXPECT_DOUBLE_EQ(ade_cost(pred, target), 12.5);
}

TEST(AdeCost, ConstantUnitResidual) {
    for (std::size_t n : {1u, 7u, 30u}) {
        auto target = line(n, 0.5, 0.25);
        auto pred = target;
        for (auto& p : pred) p.x += 1.0;
        EXPECT_NEAR(ade_cost(pred, target), 1.0, 1e-12);
    }
}

TEST(AdeCost, RejectsMismatchedLengths) {
    EXPECT_THROW(ade_cost(line(3, 1, 0), line(4, 1, 0)), InputError);
    EXPECT_THROW(ade_cost({}, {}), InputError);
}

TEST(CostVector, MatchesIndependentLoop) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 2.0);
    HypothesisSet h;
    Trajectory target(12);
    for (auto& p : target) p = {n(rng), n(rng)};
    for (int k = 0; k < 6; ++k) {
        Trajectory t(12);
        for (auto& p : t) p = {n(rng), n(rng)};
        h.trajectories.push_back(t);
    }
    const auto costs = cost_vector(h, target);
    ASSERT_EQ(costs.size(), 6u);
    for (int k = 0; k < 6; ++k) {
        double s = 0.0;
        for (int j = 0; j < 12; ++j) {
            const double dx = h.trajectories[k][j].x - target[j].x;
            const double dy = h.trajectories[k][j].y - target[j].y;
            s += dx * dx + dy * dy;
        }
        EXPECT_NEAR(costs[k], s / 12.0, 1e-12);
    }
}

TEST(CostVector, SingleHeadAndExactHit) {
    const auto target = line(4, 1, 2);
    HypothesisSet one{{line(4, 1, 1)}, {0.0}, {1.0}};
    EXPECT_EQ(cost_vector(one, target), CostVector{ade_cost(one.trajectories[0], target)});
    HypothesisSet two{{line(4, 0, 0), target}, {0.0, 0.0}, {0.5, 0.5}};
    EXPECT_EQ(cost_vector(two, target)[1], 0.0);
}

TEST(WinnerIndex, Examples) {
    EXPECT_EQ(winner_index(std::vector<double>{2.0, 1.0, 3.0}), 1u);
    EXPECT_EQ(winner_index(std::vector<double>{1.0, 1.0}), 0u);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> c(1 + trial % 9);
        for (auto& v : c) v = u(rng);
        std::size_t best = 0;
        for (std::size_t k = 1; k < c.size(); ++k) {
            if (c[k] < c[best]) best = k;
        }
        EXPECT_EQ(winner_index(c), best);
    }
}

TEST(WtaWeights, Examples) {
    expect_values(wta_weights(std::vector<double>{2, 1, 3}), {0, 1, 0});
    expect_values(wta_weights(std::vector<double>{4.2}), {1});
}

TEST(RwtaWeights, Examples) {
    expect_values(rwta_weights(std::vector<double>{0.1, 2, 3}, 0.05), {0.95, 0.025, 0.025});
    expect_values(rwta_weights(std::vector<double>{1, 2}, 0.5), {0.5, 0.5});
    expect_values(rwta_weights(std::vector<double>{3, 1, 2}, 1e-15), {0, 1, 0}, 1e-14);
}

TEST(RwtaWeights, RejectsBadEpsilon) {
    const std::vector<double> c{1, 2, 3};
    EXPECT_THROW(rwta_weights(c, 0.0), InputError);
    EXPECT_THROW(rwta_weights(c, 0.7), InputError);
    EXPECT_NO_THROW(rwta_weights(c, 2.0 / 3.0));
    EXPECT_THROW(rwta_weights(std::vector<double>{1}, 0.1), InputError);
}

TEST(EwtaWeights, Examples) {
    expect_values(ewta_weights(std::vector<double>{3, 1, 2, 5}, 2), {0, 0.5, 0.5, 0});
    expect_values(ewta_weights(std::vector<double>{3, 1, 2, 5}, 4), {0.25, 0.25, 0.25, 0.25});
    expect_values(ewta_weights(std::vector<double>{3, 1, 2, 5}, 1), {0, 1, 0, 0});
    expect_values(ewta_weights(std::vector<double>{1, 1, 1}, 2), {0.5, 0.5, 0});
    EXPECT_THROW(ewta_weights(std::vector<double>{1, 2}, 0), InputError);
    EXPECT_THROW(ewta_weights(std::vector<double>{1, 2}, 3), InputError);
}

TEST(DacWeights, Examples) {
    expect_values(dac_weights(std::vector<double>{5, 1, 9, 9}, 1), {0.5, 0.5, 0, 0});
    expect_values(dac_weights(std::vector<double>{5, 1, 9, 9}, 0), {0.25, 0.25, 0.25, 0.25});
    expect_values(dac_weights(std::vector<double>{5, 1, 9, 9}, 2), {0, 1, 0, 0});
    // K=6 depth 1: blocks {0,1,2} {3,4,5}; depth 2: {0,1} {2} {3,4} {5}
    expect_values(dac_weights(std::vector<double>{9, 9, 9, 9, 0, 9}, 1), {0, 0, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3});
    expect_values(dac_weights(std::vector<double>{9, 9, 9, 0, 9, 9}, 2), {0, 0, 0, 0.5, 0.5, 0});
    EXPECT_EQ(max_dac_depth(6), 3u);
    EXPECT_EQ(max_dac_depth(4), 2u);
    EXPECT_EQ(max_dac_depth(1), 0u);
    EXPECT_THROW(dac_weights(std::vector<double>{1, 2}, 2), InputError);
}

TEST(AwtaWeights, Examples) {
    expect_values(awta_weights(std::vector<double>{3.5, 3.5}, 0.7), {0.5, 0.5});
    const double t = 1.3;
    expect_values(awta_weights(std::vector<double>{0.0, t * std::log(2.0)}, t), {2.0 / 3, 1.0 / 3});
    expect_values(awta_weights(std::vector<double>{1.0, 2.0}, 1e-9), {1, 0}, 1e-9);
    expect_values(awta_weights(std::vector<double>{1.0, 2.0}, 1e9), {0.5, 0.5}, 1e-6);
    EXPECT_THROW(awta_weights(std::vector<double>{1, 2}, 0.0), InputError);
}

TEST(AwtaWeights, NoOverflowAtTinyTemperature) {
    const auto w = awta_weights(std::vector<double>{1e6, 2e6, 1e6 + 1}, 1e-8);
    expect_values(w, {1, 0, 0});
}

TEST(AwtaWeights, LimitsScaleWithGapAndSpread) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> c(2 + trial % 7);
        for (auto& v : c) v = u(rng);
        auto sorted = c;
        std::sort(sorted.begin(), sorted.end());
        const double gap = sorted[1] - sorted[0];
        const double spread = sorted.back() - sorted.front();
        if (gap <= 0) continue;
        const auto hard = wta_weights(c);
        const auto cold = awta_weights(c, 1e-6 * gap);
        const auto hot = awta_weights(c, 1e6 * spread);
        for (std::size_t k = 0; k < c.size(); ++k) {
            EXPECT_NEAR(cold[k], hard[k], 1e-6);
            EXPECT_NEAR(hot[k], 1.0 / static_cast<double>(c.size()), 1e-6);
        }
    }
}

TEST(WeightedLoss, Reductions) {
    const std::vector<double> c{2.0, 0.5, 3.0, 1.5};
    EXPECT_DOUBLE_EQ(weighted_loss(c, wta_weights(c)), 0.5);
    EXPECT_DOUBLE_EQ(weighted_loss(c, ewta_weights(c, 4)), 7.0 / 4);
    EXPECT_NEAR(weighted_loss(c, awta_weights(c, 1e-9)), 0.5, 1e-6);
    EXPECT_THROW(weighted_loss(c, wta_weights(std::vector<double>{1, 2})), InputError);
}

TEST(ScoreLoss, Examples) {
    EXPECT_NEAR(score_loss(std::vector<double>(6, 1.0 / 6), 2).value, std::log(6.0), 1e-12);
    EXPECT_NEAR(std::log(6.0), 1.7918, 1e-4);
    EXPECT_EQ(score_loss(std::vector<double>{0, 1, 0}, 1).value, 0.0);
    EXPECT_NEAR(score_loss(std::vector<double>{0.5, 0.25, 0.25}, 0).value, std::log(2.0), 1e-12);
    const auto clamped = score_loss(std::vector<double>{1.0, 0.0}, 1);
    EXPECT_TRUE(clamped.clamped);
    EXPECT_NEAR(clamped.value, -std::log(1e-12), 1e-9);
}

TEST(AssignmentWeights, AlwaysNormalized) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 2 + trial % 7;
        std::vector<double> c(k);
        for (auto& v : c) v = u(rng);
        for (const auto& w : {wta_weights(c), rwta_weights(c, 0.05), ewta_weights(c, 1 + trial % k),
                              dac_weights(c, trial % (max_dac_depth(k) + 1)), awta_weights(c, 0.5)}) {
            EXPECT_NEAR(std::accumulate(w.values.begin(), w.values.end(), 0.0), 1.0, 1e-12);
            for (double v : w.values) EXPECT_GE(v, 0.0);
        }
    }
}

TEST(LossConfig, DispatchAndValidation) {
    const std::vector<double> c{2, 1, 3};
    LossConfig cfg;
    cfg.variant = Variant::EWTA;
    cfg.top_n = 2;
    expect_values(assignment_weights(c, cfg), {0.5, 0.5, 0});
    cfg.top_n = 4;
    EXPECT_THROW(cfg.validate(3), ConfigError);
    cfg = {};
    cfg.temperature = -1;
    EXPECT_THROW(cfg.validate(3), ConfigError);
    cfg = {};
    cfg.score_coefficient = -0.5;
    EXPECT_THROW(cfg.validate(3), ConfigError);
    EXPECT_EQ(parse_variant("aWTA"), Variant::AWTA);
    EXPECT_EQ(to_string(Variant::DAC), "dac");
    EXPECT_THROW(parse_variant("soft"), ConfigError);
}

TEST(SampleObjective, GradientMatchesClosedForm) {
    HypothesisSet h;
    h.trajectories = {{{1, 0}, {2, 0}}, {{0, 1}, {0, 3}}};
    h.score_logits = {0.2, -0.1};
    const double z = std::exp(0.2) + std::exp(-0.1);
    h.scores = {std::exp(0.2) / z, std::exp(-0.1) / z};
    const Trajectory target = {{0.5, 0}, {1.5, 0}};
    LossConfig cfg;
    cfg.temperature = 0.8;
    cfg.score_coefficient = 0.7;
    auto grad = HypothesisGradient::zeros(2, 2);
    const auto obj = sample_objective(h, target, cfg, &grad);
    const auto costs = cost_vector(h, target);
    const auto q = awta_weights(costs, 0.8);
    EXPECT_EQ(obj.winner, 0u);
    EXPECT_NEAR(obj.regression, q[0] * costs[0] + q[1] * costs[1], 1e-12);
    EXPECT_NEAR(obj.score, -std::log(h.scores[0]), 1e-12);
    EXPECT_NEAR(obj.total, obj.regression + 0.7 * obj.score, 1e-12);
    for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < 2; ++j) {
            EXPECT_NEAR(grad.d_trajectories[k][j].x, q[k] * (h.trajectories[k][j].x - target[j].x), 1e-12);
            EXPECT_NEAR(grad.d_trajectories[k][j].y, q[k] * (h.trajectories[k][j].y - target[j].y), 1e-12);
        }
        EXPECT_NEAR(grad.d_logits[k], 0.7 * (h.scores[k] - (k == 0 ? 1.0 : 0.0)), 1e-12);
    }
}
