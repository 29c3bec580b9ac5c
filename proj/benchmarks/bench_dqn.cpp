#include <benchmark/benchmark.h>

#include <vector>

#include "aoinoma/dqn/trainer.hpp"

using namespace aoinoma;
using namespace aoinoma::dqn;

static void BM_MlpForward(benchmark::State& state)
{
    const int width = static_cast<int>(state.range(0));
    Rng rng = make_stream(1, Stream::Init);
    const Mlp net = Mlp::glorot({40, width, width, width, 60}, rng);
    std::vector<double> x(40, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.forward(x));
    }
}
BENCHMARK(BM_MlpForward)->Arg(32)->Arg(64)->Arg(128);

static void BM_MlpBatchForwardBackward(benchmark::State& state)
{
    const int batch = static_cast<int>(state.range(0));
    Rng rng = make_stream(2, Stream::Init);
    const Mlp net = Mlp::glorot({40, 64, 64, 64, 60}, rng);
    std::vector<double> x(40 * batch);
    for (auto& v : x) {
        v = uniform01(rng);
    }
    std::vector<double> g_out(60 * batch, 1e-3);
    std::vector<double> grad(net.param_count());
    Mlp::BatchTape tape;
    for (auto _ : state) {
        net.forward_batch(x, batch, tape);
        net.backward_batch(tape, g_out, grad);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpBatchForwardBackward)->Arg(32);

static void BM_AdamStep(benchmark::State& state)
{
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> p(n, 0.1), g(n, 1e-3);
    AdamState st(n);
    const AdamConfig cfg;
    for (auto _ : state) {
        adam_step(p, g, st, cfg);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_AdamStep)->Arg(12000);

static void BM_GreedyAction(benchmark::State& state)
{
    mdp::EnvConfig cfg;
    cfg.ues = static_cast<int>(state.range(0));
    mdp::NomaEnv env(cfg, 3);
    env.reset();
    const ActionHeads heads(env.model(), mdp::PowerRule::Grid, true);
    Rng rng = make_stream(3, Stream::Init);
    std::vector<double> q(heads.output_dim());
    for (auto& v : q) {
        v = uniform01(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(heads.greedy(q, env.context(), mdp::ActionSpace{}));
    }
}
BENCHMARK(BM_GreedyAction)->Arg(3)->Arg(5);

static void BM_TrainEpisode(benchmark::State& state)
{
    mdp::EnvConfig env_cfg;
    TrainConfig cfg;
    cfg.steps = 100;
    Trainer trainer(env_cfg, cfg, baselines::Scheme::Proposed, 2, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(trainer.train_episode());
    }
}
BENCHMARK(BM_TrainEpisode)->Unit(benchmark::kMillisecond)->Iterations(5);
