#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "steer/errors.hpp"
#include "steer/meanfield.hpp"
#include "steer/micro.hpp"
#include "steer/rng.hpp"
#include "steer/scenario.hpp"

using namespace steer;

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

ParticleEnsemble uniform_ensemble(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ParticleEnsemble ensemble;
    ensemble.particles = sample_initial(n, 2.0, 5.0, rng);
    ensemble.weight = 1.0 / static_cast<double>(n);
    return ensemble;
}

}  // namespace

TEST_CASE("interaction field vanishes on a single particle at its own position") {
    ParticleEnsemble one;
    one.particles = {3.0};
    one.weight = 1.0;
    const std::vector<std::size_t> idx{0};
    CHECK(interaction_field(one, KernelSpec::rational_decay(0.04), idx, 3.0) == 0.0);
}

TEST_CASE("interaction field equals the hand-computed empirical integral") {
    ParticleEnsemble two;
    two.particles = {0.0, 2.0};
    two.weight = 0.5;
    const std::vector<std::size_t> idx = all_indices(2);
    CHECK(interaction_field(two, KernelSpec::constant(0.04), idx, 0.0) ==
          doctest::Approx(0.04).epsilon(1e-14));
}

TEST_CASE("full subsample reproduces the direct weighted sum") {
    const ParticleEnsemble ensemble = uniform_ensemble(100, 5);
    const KernelSpec kernel = KernelSpec::rational_decay(0.04);
    const std::vector<std::size_t> idx = all_indices(100);
    for (const double at : {0.0, 2.5, 4.0}) {
        double direct = 0.0;
        for (const double y : ensemble.particles) {
            direct += kernel_eval(kernel, at, y) * (y - at);
        }
        direct *= ensemble.weight;
        CHECK(std::abs(interaction_field(ensemble, kernel, idx, at) - direct) <= 1e-12);
    }
}

TEST_CASE("interaction field rejects an empty subsample") {
    const ParticleEnsemble ensemble = uniform_ensemble(10, 6);
    CHECK_THROWS_AS(
        interaction_field(ensemble, KernelSpec::constant(0.04), std::vector<std::size_t>{}, 0.0),
        ValidationError);
}

TEST_CASE("first moment") {
    ParticleEnsemble two;
    two.particles = {2.0, 4.0};
    two.weight = 0.5;
    CHECK(first_moment(two) == doctest::Approx(3.0).epsilon(1e-14));
    two.weight = 0.45;  // rho_f = 0.9 over two particles
    CHECK(first_moment(two) == doctest::Approx(2.7).epsilon(1e-14));
    ParticleEnsemble one;
    one.particles = {1.0};
    one.weight = 1.0;
    CHECK(first_moment(one) == 1.0);
}

TEST_CASE("full-sample mfmc step equals the microscopic euler step exactly") {
    const std::size_t n = 50;
    ParticleEnsemble ensemble = uniform_ensemble(n, 7);
    AgentState state{ensemble.particles, 0.0};
    const KernelSpec kernel = KernelSpec::rational_decay(0.04);
    const ControlConfig control{-0.1, 1.0, {}};

    Rng rng(123);
    MfmcWorkspace ws;
    for (int step = 0; step < 20; ++step) {
        mfmc_step(ensemble, 0.01, kernel, &control, MfmcConfig{n}, rng, ws);
        state = euler_step(state, 0.01, kernel, &control);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(ensemble.particles[i] == state.positions[i]);
        }
    }
}

TEST_CASE("consensus at the target is a fixed point of the particle step") {
    ParticleEnsemble ensemble;
    ensemble.particles.assign(7, 1.0);
    ensemble.weight = 1.0 / 7.0;
    const ControlConfig control{-0.1, 1.0, {}};
    Rng rng(1);
    MfmcWorkspace ws;
    mfmc_step(ensemble, 0.01, KernelSpec::rational_decay(0.04), &control, MfmcConfig{3}, rng, ws);
    for (const double y : ensemble.particles) CHECK(y == 1.0);
}

TEST_CASE("uncontrolled full-sample dynamics preserve the mean over 1000 steps") {
    const std::size_t n = 64;
    ParticleEnsemble ensemble = uniform_ensemble(n, 8);
    const double m0 = first_moment(ensemble);
    Rng rng(9);
    MfmcWorkspace ws;
    for (int step = 0; step < 1000; ++step) {
        mfmc_step(ensemble, 0.01, KernelSpec::constant(0.04), nullptr, MfmcConfig{n}, rng, ws);
    }
    CHECK(std::abs(first_moment(ensemble) - m0) <= 1e-9);
}

TEST_CASE("mass is conserved over a subsampled run") {
    ParticleEnsemble ensemble = uniform_ensemble(200, 10);
    const double mass0 = ensemble.total_mass();
    Rng rng(11);
    const ParticleEnsemble final_state =
        run_meanfield(std::move(ensemble), 5.0, 0.01, KernelSpec::rational_decay(0.04), nullptr,
                      MfmcConfig{20}, rng, {});
    CHECK(final_state.total_mass() == mass0);
    CHECK(final_state.particles.size() == 200);
    const HistogramResult hist = histogram(final_state, 0.0, 6.0, 100);
    double total = hist.overflow;
    for (const double b : hist.bin_mass) total += b;
    CHECK(total == doctest::Approx(mass0).epsilon(1e-12));
}

TEST_CASE("same seed gives bit-identical subsampled trajectories") {
    for (int rep = 0; rep < 2; ++rep) {
        ParticleEnsemble a = uniform_ensemble(100, 12);
        ParticleEnsemble b = uniform_ensemble(100, 12);
        Rng ra(77);
        Rng rb(77);
        const ControlConfig control{-0.1, 1.0, {}};
        const ParticleEnsemble fa = run_meanfield(std::move(a), 2.0, 0.01,
                                                  KernelSpec::rational_decay(0.04), &control,
                                                  MfmcConfig{10}, ra, {});
        const ParticleEnsemble fb = run_meanfield(std::move(b), 2.0, 0.01,
                                                  KernelSpec::rational_decay(0.04), &control,
                                                  MfmcConfig{10}, rb, {});
        CHECK(fa.particles == fb.particles);
    }
}

TEST_CASE("subsampled estimator is unbiased within three standard errors") {
    const std::size_t n = 100;
    const std::size_t n_sample = 10;
    const int resamples = 10000;
    const ParticleEnsemble ensemble = uniform_ensemble(n, 13);
    const KernelSpec kernel = KernelSpec::rational_decay(0.04);
    const double at = 2.5;

    const double exact = interaction_field(ensemble, kernel, all_indices(n), at);

    Rng rng(14);
    MfmcWorkspace ws;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < resamples; ++r) {
        rng.sample_without_replacement(n, n_sample, ws.pool, ws.subsample);
        const double est = interaction_field(ensemble, kernel, ws.subsample, at);
        sum += est;
        sum_sq += est * est;
    }
    const double mean = sum / resamples;
    const double variance = (sum_sq - resamples * mean * mean) / (resamples - 1);
    const double standard_error = std::sqrt(variance / resamples);
    CHECK(std::abs(mean - exact) < 3.0 * standard_error);
}

TEST_CASE("histogram places mass by hand") {
    ParticleEnsemble two;
    two.particles = {2.0, 4.0};
    two.weight = 0.5;
    const HistogramResult hist = histogram(two, 0.0, 5.0, 5);
    REQUIRE(hist.bin_mass.size() == 5);
    CHECK(hist.bin_mass[0] == 0.0);
    CHECK(hist.bin_mass[1] == 0.0);
    CHECK(hist.bin_mass[2] == 0.5);
    CHECK(hist.bin_mass[3] == 0.0);
    CHECK(hist.bin_mass[4] == 0.5);
    CHECK(hist.overflow == 0.0);
}

TEST_CASE("histogram edge semantics") {
    ParticleEnsemble ens;
    ens.particles = {0.0, 5.0, -1.0, 6.0};  // lo, hi (last bin), below, above
    ens.weight = 0.25;
    const HistogramResult hist = histogram(ens, 0.0, 5.0, 5);
    CHECK(hist.bin_mass[0] == 0.25);
    CHECK(hist.bin_mass[4] == 0.25);
    CHECK(hist.overflow == 0.5);
}

TEST_CASE("disjoint range puts all mass in overflow") {
    ParticleEnsemble two;
    two.particles = {2.0, 4.0};
    two.weight = 0.5;
    const HistogramResult hist = histogram(two, 10.0, 11.0, 4);
    for (const double b : hist.bin_mass) CHECK(b == 0.0);
    CHECK(hist.overflow == 1.0);
}

TEST_CASE("histogram validates its range") {
    ParticleEnsemble two;
    two.particles = {2.0, 4.0};
    two.weight = 0.5;
    CHECK_THROWS_AS(histogram(two, 5.0, 5.0, 10), ValidationError);
    CHECK_THROWS_AS(histogram(two, 0.0, 5.0, 0), ValidationError);
}

TEST_CASE("run_meanfield validates the subsample size") {
    ParticleEnsemble ensemble = uniform_ensemble(10, 20);
    Rng rng(21);
    CHECK_THROWS_AS(run_meanfield(std::move(ensemble), 1.0, 0.01, KernelSpec::constant(0.04),
                                  nullptr, MfmcConfig{11}, rng, {}),
                    ValidationError);
}
