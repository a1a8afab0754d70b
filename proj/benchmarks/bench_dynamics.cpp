#include <benchmark/benchmark.h>

#include <vector>

#include "steer/kernel.hpp"
#include "steer/leader_follower.hpp"
#include "steer/meanfield.hpp"
#include "steer/micro.hpp"
#include "steer/rng.hpp"
#include "steer/scenario.hpp"

namespace {

steer::AgentState make_state(std::size_t n) {
    steer::Rng rng(1);
    return {steer::sample_initial(n, 2.0, 5.0, rng), 0.0};
}

void MicroRhsRational(benchmark::State& state) {
    const auto agents = make_state(static_cast<std::size_t>(state.range(0)));
    const auto kernel = steer::KernelSpec::rational_decay(0.04);
    std::vector<double> velocity(agents.positions.size());
    for (auto _ : state) {
        steer::micro_rhs(agents, kernel, nullptr, velocity);
        benchmark::DoNotOptimize(velocity.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(MicroRhsRational)->RangeMultiplier(4)->Range(50, 3200)->Complexity();

void MicroRhsConstant(benchmark::State& state) {
    const auto agents = make_state(static_cast<std::size_t>(state.range(0)));
    const auto kernel = steer::KernelSpec::constant(0.04);
    std::vector<double> velocity(agents.positions.size());
    for (auto _ : state) {
        steer::micro_rhs(agents, kernel, nullptr, velocity);
        benchmark::DoNotOptimize(velocity.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(MicroRhsConstant)->RangeMultiplier(4)->Range(50, 3200)->Complexity();

void MfmcStepSubsampled(benchmark::State& state) {
    const std::size_t n = 10000;
    const auto n_sample = static_cast<std::size_t>(state.range(0));
    steer::Rng init(2);
    steer::ParticleEnsemble ensemble;
    ensemble.particles = steer::sample_initial(n, 2.0, 5.0, init);
    ensemble.weight = 1.0 / static_cast<double>(n);
    const auto kernel = steer::KernelSpec::rational_decay(0.04);
    const steer::ControlConfig control{-0.1, 1.0, {}};
    steer::Rng rng(3);
    steer::MfmcWorkspace ws;
    for (auto _ : state) {
        steer::mfmc_step(ensemble, 0.01, kernel, &control, steer::MfmcConfig{n_sample}, rng, ws);
        benchmark::DoNotOptimize(ensemble.particles.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n_sample));
}
BENCHMARK(MfmcStepSubsampled)->Arg(100)->Arg(1000);

void HybridStep(benchmark::State& state) {
    const auto split = steer::make_split(999, 1, 0.9, 0.1);
    steer::Rng init(4);
    steer::HybridState hybrid;
    hybrid.followers.particles = steer::sample_initial(split.n_followers, 2.0, 5.0, init);
    hybrid.followers.weight = split.omega_f();
    hybrid.leaders = steer::sample_initial(split.n_leaders, 2.0, 5.0, init);
    const auto kernel = steer::KernelSpec::constant(0.04);
    steer::Rng rng(5);
    for (auto _ : state) {
        auto vel = steer::hybrid_rhs(hybrid, split, kernel, -0.1, 1.0, steer::MfmcConfig{200}, rng);
        benchmark::DoNotOptimize(vel.followers.data());
    }
}
BENCHMARK(HybridStep);

void HistogramBinning(benchmark::State& state) {
    steer::Rng init(6);
    steer::ParticleEnsemble ensemble;
    ensemble.particles = steer::sample_initial(10000, 2.0, 5.0, init);
    ensemble.weight = 1e-4;
    for (auto _ : state) {
        auto hist = steer::histogram(ensemble, 0.0, 6.0, 100);
        benchmark::DoNotOptimize(hist.bin_mass.data());
    }
}
BENCHMARK(HistogramBinning);

}  // namespace

BENCHMARK_MAIN();
