#include <benchmark/benchmark.h>

#include "aoinoma/channel.hpp"
#include "aoinoma/mdp_env.hpp"
#include "aoinoma/phy_noma.hpp"

using namespace aoinoma;

namespace {

mdp::EnvConfig cell(int ues, int carriers, int types)
{
    mdp::EnvConfig cfg;
    cfg.ues = ues;
    cfg.radio.subcarriers = carriers;
    cfg.info.types = types;
    cfg.info.packet_bits.assign(static_cast<std::size_t>(types), 1000.0);
    return cfg;
}

}  // namespace

static void BM_EnvStepIdle(benchmark::State& state)
{
    mdp::NomaEnv env(cell(static_cast<int>(state.range(0)), 2, 3), 1);
    const auto& m = env.model();
    const auto idle = mdp::ActionVector::idle(m.ues, m.carriers(), m.types());
    long t = 0;
    for (auto _ : state) {
        if (++t % 300 == 0) {
            env.reset();
        }
        benchmark::DoNotOptimize(env.step(idle, mdp::ActionSpace{}));
    }
}
BENCHMARK(BM_EnvStepIdle)->Arg(3)->Arg(5);

static void BM_EnumerateFeasible(benchmark::State& state)
{
    mdp::NomaEnv env(cell(static_cast<int>(state.range(0)), 2, 2), 2);
    env.reset();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mdp::enumerate_feasible_actions(env.context(), env.model(), mdp::ActionSpace{}));
    }
}
BENCHMARK(BM_EnumerateFeasible)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

static void BM_Sinr(benchmark::State& state)
{
    const int ues = static_cast<int>(state.range(0));
    Rng rng = make_stream(3, Stream::Fading);
    Grid<double> h(ues, 4), p(ues, 4, 0.01);
    Grid<std::uint8_t> rho(ues, 4, 1);
    for (auto& v : h.flat()) {
        v = channel::sample_fading(rng, 1.0) * 1e-9;
    }
    const phy::RadioConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phy::sinr(p, h, rho, cfg));
    }
}
BENCHMARK(BM_Sinr)->RangeMultiplier(2)->Range(2, 16);

static void BM_QuantizeGain(benchmark::State& state)
{
    const auto q = channel::Quantizer::build(8, 1.0);
    Rng rng = make_stream(4, Stream::Fading);
    for (auto _ : state) {
        benchmark::DoNotOptimize(q.level_of(channel::sample_fading(rng, 1.0)));
    }
}
BENCHMARK(BM_QuantizeGain);
