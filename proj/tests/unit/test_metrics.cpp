#include "mcl/error.hpp"
#include "mcl/metrics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mcl;
using namespace mcl::metrics;

namespace {

HypothesisSet random_set(std::size_t k, std::size_t horizon, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 3.0);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    HypothesisSet h;
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        Trajectory t(horizon);
        for (auto& p : t) p = {n(rng), n(rng)};
        h.trajectories.push_back(t);
        h.scores.push_back(u(rng));
        z += h.scores.back();
    }
    for (auto& s : h.scores) s /= z;
    for (double s : h.scores) h.score_logits.push_back(std::log(s));
    return h;
}

Trajectory offset(const Trajectory& t, double dx, double dy) {
    auto out = t;
    for (auto& p : out) {
        p.x += dx;
        p.y += dy;
    }
    return out;
}

}  // namespace

TEST(MinAde, Examples) {
    const Trajectory y = {{0, 0}, {1, 0}, {2, 1}};
    HypothesisSet exact{{offset(y, 9, 9), y}, {0, 0}, {0.5, 0.5}};
    EXPECT_EQ(min_ade(exact, y), 0.0);
    HypothesisSet shifted{{offset(y, 3, 4)}, {0}, {1}};
    EXPECT_DOUBLE_EQ(min_ade(shifted, y), 5.0);
}

TEST(MinFde, Examples) {
    const Trajectory y = {{0, 0}, {5, 5}};
    HypothesisSet h{{{{0, 0}, {5, 7}}, {{0, 0}, {6, 5}}}, {0, 0}, {0.5, 0.5}};
    const auto r = min_fde(h, y);
    EXPECT_DOUBLE_EQ(r.value, 1.0);
    EXPECT_EQ(r.best_index, 1u);
    HypothesisSet hit{{y}, {0}, {1}};
    EXPECT_EQ(min_fde(hit, y).value, 0.0);
}

TEST(MissRate, Examples) {
    EXPECT_EQ(miss_rate(std::vector<double>{0, 0, 0}), 0.0);
    EXPECT_EQ(miss_rate(std::vector<double>{1.9, 2.1}), 0.5);
    EXPECT_EQ(miss_rate(std::vector<double>{2.0}), 0.0);
    EXPECT_THROW(miss_rate(std::vector<double>{}), InputError);
}

TEST(BrierFde, Examples) {
    const Trajectory y = {{0, 0}, {1, 1}};
    HypothesisSet perfect{{y, offset(y, 3, 0)}, {0, -50}, {1.0, 0.0}};
    EXPECT_EQ(brier_fde(perfect, y), 0.0);
    HypothesisSet half{{offset(y, 1, 0), offset(y, 4, 0)}, {0, 0}, {0.5, 0.5}};
    EXPECT_DOUBLE_EQ(brier_fde(half, y), 1.25);
    HypothesisSet uniform;
    for (int k = 0; k < 6; ++k) uniform.trajectories.push_back(offset(y, 1.46 + k, 0));
    uniform.scores.assign(6, 1.0 / 6);
    uniform.score_logits.assign(6, 0.0);
    EXPECT_NEAR(brier_fde(uniform, y), 1.46 + 25.0 / 36.0, 1e-12);
    EXPECT_NEAR(brier_fde(uniform, y), 2.154, 1e-3);
}

TEST(EffectiveHypotheses, Examples) {
    EXPECT_EQ(effective_hypotheses(std::vector<std::size_t>{100, 0, 0, 0, 0, 0}), 1u);
    EXPECT_EQ(effective_hypotheses(std::vector<std::size_t>(6, 17)), 6u);
    EXPECT_EQ(effective_hypotheses(std::vector<std::size_t>{50, 49, 1, 0, 0, 0}, 0.01), 3u);
}

TEST(Metrics, MatchBruteForceOracle) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const auto h = random_set(1 + trial % 8, 1 + trial % 13, rng);
        Trajectory y(h.horizon());
        std::normal_distribution<double> n(0.0, 3.0);
        for (auto& p : y) p = {n(rng), n(rng)};
        const auto ref = oracle::brute_metrics(h, y);
        EXPECT_NEAR(min_ade(h, y), ref.min_ade, 1e-9);
        EXPECT_NEAR(min_fde(h, y).value, ref.min_fde, 1e-9);
        EXPECT_EQ(min_fde(h, y).best_index, ref.fde_index);
        EXPECT_NEAR(brier_fde(h, y), ref.brier_fde, 1e-9);
    }
}

TEST(Metrics, HorizonMismatchIsAnError) {
    HypothesisSet h{{{{0, 0}, {1, 1}}}, {0}, {1}};
    EXPECT_THROW(min_ade(h, Trajectory{{0, 0}}), InputError);
}

namespace {

std::vector<data::Scene> small_scenes(std::size_t n) {
    data::GeneratorConfig g;
    g.past_steps = 3;
    g.future_steps = 4;
    g.seed = 77;
    return data::generate(g, n);
}

}  // namespace

TEST(Evaluate, OracleModelIsPerfect) {
    const auto scenes = small_scenes(20);
    const Predictor oracle_model = [](const data::Features& f) {
        HypothesisSet h;
        h.trajectories = {f.target, offset(f.target, 10, 0)};
        h.score_logits = {0.0, 0.0};
        h.scores = {0.5, 0.5};
        return h;
    };
    const auto r = evaluate(oracle_model, scenes);
    EXPECT_EQ(r.scenes, 20u);
    EXPECT_EQ(r.min_ade, 0.0);
    EXPECT_EQ(r.min_fde, 0.0);
    EXPECT_EQ(r.miss_rate, 0.0);
    EXPECT_EQ(r.winner_histogram, (std::vector<std::size_t>{20, 0}));
    EXPECT_EQ(r.effective_hypotheses, 1u);
}

TEST(Evaluate, DuplicatedDatasetGivesSameReport) {
    auto scenes = small_scenes(10);
    nn::ModelConfig mc;
    mc.input_width = 6;
    mc.horizon = 4;
    mc.heads = 3;
    mc.hidden_widths = {8};
    mc.seed = 3;
    const nn::ModelParams model(mc);
    const auto once = evaluate(model, scenes);
    auto twice = scenes;
    twice.insert(twice.end(), scenes.begin(), scenes.end());
    const auto r2 = evaluate(model, twice);
    EXPECT_NEAR(r2.min_ade, once.min_ade, 1e-12);
    EXPECT_NEAR(r2.min_fde, once.min_fde, 1e-12);
    EXPECT_NEAR(r2.miss_rate, once.miss_rate, 1e-12);
    EXPECT_NEAR(r2.brier_fde, once.brier_fde, 1e-12);
    EXPECT_EQ(r2.effective_hypotheses, once.effective_hypotheses);
}

TEST(Evaluate, RandomModelMatchesBruteForce) {
    const auto scenes = small_scenes(10);
    nn::ModelConfig mc;
    mc.input_width = 6;
    mc.horizon = 4;
    mc.heads = 4;
    mc.hidden_widths = {8, 8};
    mc.seed = 11;
    const nn::ModelParams model(mc);
    const auto r = evaluate(model, scenes);
    double ade = 0, fde = 0, brier = 0;
    std::vector<double> fdes;
    for (const auto& s : scenes) {
        const auto f = data::featurize(s);
        const auto ref = oracle::brute_metrics(nn::forward(model, f.context), f.target);
        ade += ref.min_ade;
        fde += ref.min_fde;
        brier += ref.brier_fde;
        fdes.push_back(ref.min_fde);
    }
    EXPECT_NEAR(r.min_ade, ade / 10, 1e-9);
    EXPECT_NEAR(r.min_fde, fde / 10, 1e-9);
    EXPECT_NEAR(r.brier_fde, brier / 10, 1e-9);
    EXPECT_NEAR(r.miss_rate, oracle::brute_miss_rate(fdes, 2.0), 1e-12);
}

TEST(Evaluate, NmsReducesToRequestedCount) {
    const auto scenes = small_scenes(5);
    std::size_t seen = 0;
    const Predictor twelve = [&](const data::Features& f) {
        HypothesisSet h;
        for (int k = 0; k < 12; ++k) h.trajectories.push_back(offset(f.target, 0.5 * k, 0));
        h.score_logits.assign(12, 0.0);
        h.scores.assign(12, 1.0 / 12);
        return h;
    };
    EvaluationOptions opts;
    opts.top_k = 6;
    opts.nms = postselect::NMSConfig{6, 2.0};
    const auto r = evaluate(twelve, scenes, opts);
    seen = r.winner_histogram.size();
    EXPECT_EQ(seen, 6u);
    EXPECT_EQ(r.min_fde, 0.0);
    opts.top_k = 13;
    EXPECT_THROW(evaluate(twelve, scenes, opts), InputError);
}

TEST(Evaluate, MergeRadiusCountsCoincidentHeadsOnce) {
    const auto scenes = small_scenes(40);
    std::size_t call = 0;
    const Predictor twins = [&](const data::Features& f) {
        HypothesisSet h;
        // Head 1 sits a hair closer than head 0 on odd calls.
        const double eps = (call++ % 2) ? 1e-3 : -1e-3;
        h.trajectories = {offset(f.target, 0.5, 0), offset(f.target, 0.5 + eps, 0)};
        h.score_logits = {0.0, 0.0};
        h.scores = {0.5, 0.5};
        return h;
    };
    EvaluationOptions opts;
    EXPECT_EQ(evaluate(twins, scenes, opts).effective_hypotheses, 2u);
    call = 0;
    opts.merge_radius = 0.1;
    EXPECT_EQ(evaluate(twins, scenes, opts).effective_hypotheses, 1u);
}

TEST(Evaluate, CsvSchema) {
    EXPECT_EQ(csv_header(), "scenes,min_ade,min_fde,miss_rate,brier_fde,effective_hypotheses");
    MetricsReport r;
    r.scenes = 2;
    r.min_ade = 0.5;
    r.min_fde = 1.25;
    r.miss_rate = 0.5;
    r.brier_fde = 1.5;
    r.effective_hypotheses = 3;
    EXPECT_EQ(csv_row(r), "2,0.5,1.25,0.5,1.5,3");
}
