#include "mcl/datagen.hpp"
#include "mcl/losses.hpp"
#include "mcl/metrics.hpp"
#include "mcl/nn.hpp"
#include "mcl/postselect.hpp"
#include "mcl/training.hpp"

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

using namespace mcl;

namespace {

losses::CostVector random_costs(std::size_t k) {
    std::mt19937_64 rng(k);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    losses::CostVector c(k);
    for (auto& v : c) v = u(rng);
    return c;
}

void BM_AwtaWeights(benchmark::State& state) {
    const auto c = random_costs(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(losses::awta_weights(c, 0.5));
}
BENCHMARK(BM_AwtaWeights)->Arg(6)->Arg(12)->Arg(64);

void BM_EwtaWeights(benchmark::State& state) {
    const auto c = random_costs(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(losses::ewta_weights(c, c.size() / 2));
}
BENCHMARK(BM_EwtaWeights)->Arg(6)->Arg(12)->Arg(64);

void BM_DacWeights(benchmark::State& state) {
    const auto c = random_costs(static_cast<std::size_t>(state.range(0)));
    const auto depth = losses::max_dac_depth(c.size()) / 2;
    for (auto _ : state) benchmark::DoNotOptimize(losses::dac_weights(c, depth));
}
BENCHMARK(BM_DacWeights)->Arg(6)->Arg(12)->Arg(64);

nn::ModelConfig bench_model(std::size_t heads) {
    nn::ModelConfig mc;
    mc.heads = heads;
    mc.horizon = 30;
    mc.input_width = 40;
    return mc;
}

void BM_ForwardBatch(benchmark::State& state) {
    const nn::ModelParams p(bench_model(6));
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(40, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(nn::forward_batch(p, x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(32)->Arg(128);

void BM_TrainStep(benchmark::State& state) {
    data::GeneratorConfig g;
    const auto scenes = data::generate(g, 256);
    const auto set = TrainingSet::from_scenes(scenes);
    nn::ModelParams p(bench_model(static_cast<std::size_t>(state.range(0))));
    auto adam = nn::AdamState::for_params(p);
    std::vector<std::size_t> batch(32);
    std::iota(batch.begin(), batch.end(), std::size_t{0});
    losses::LossConfig loss;
    loss.temperature = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(train_step(p, adam, set, batch, loss, {}));
    state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainStep)->Arg(6)->Arg(12);

void BM_NmsSelect(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 5.0);
    HypothesisSet h;
    const auto k = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < k; ++i) {
        Trajectory t(30);
        for (auto& pt : t) pt = {n(rng), n(rng)};
        h.trajectories.push_back(t);
        h.score_logits.push_back(n(rng));
    }
    h.scores = nn::softmax(h.score_logits);
    for (auto _ : state) benchmark::DoNotOptimize(postselect::nms_select(h, {6, 2.0}));
}
BENCHMARK(BM_NmsSelect)->Arg(12)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
