#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "steer/kernel.hpp"
#include "steer/micro.hpp"
#include "steer/rng.hpp"

namespace steer {

/// Weighted particle approximation of a density: every particle carries the
/// same weight (1/N for a probability density, rho_f/N for the follower
/// sub-density), so total mass = weight * particle count.
struct ParticleEnsemble {
    std::vector<double> particles;
    double weight = 0.0;
    double time = 0.0;

    double total_mass() const { return weight * static_cast<double>(particles.size()); }
};

void validate(const ParticleEnsemble& ensemble);

/// Subsampled interaction estimator settings. One subsample of size
/// n_sample is drawn per time step and shared by every particle, giving the
/// O(n_sample * N) cost; indices are kept ascending so sums are
/// reproducible. With n_sample = N the estimator is the exact
/// empirical-measure integral.
struct MfmcConfig {
    std::size_t n_sample = 1000;
};

/// Estimator of the non-local field at x = `at`:
///   (total_mass / |subsample|) * sum_{j in subsample} P(at, y_j)(y_j - at).
double interaction_field(const ParticleEnsemble& ensemble, const KernelSpec& kernel,
                         std::span<const std::size_t> subsample, double at);

/// weight * sum_j y_j: the plain mean for weight = 1/N, the mass-rho_f first
/// moment for the follower sub-density.
double first_moment(const ParticleEnsemble& ensemble);

/// Reusable buffers for the per-step subsample draw and velocity sweep.
struct MfmcWorkspace {
    std::vector<std::size_t> pool;
    std::vector<std::size_t> subsample;
    std::vector<double> velocity;
};

/// One forward Euler step of the particle system: draws one shared
/// subsample (exactly cfg.n_sample raw draws), then advances every particle
/// by the subsampled field plus the control drift b_i * k * (m1 - c). The
/// control moment m1 always uses the exact full ensemble, never the
/// subsample. An empty control actuation means every particle is actuated;
/// otherwise actuation.size() must equal the particle count.
void mfmc_step(ParticleEnsemble& ensemble, double dt, const KernelSpec& kernel,
               const ControlConfig* control, const MfmcConfig& cfg, Rng& rng,
               MfmcWorkspace& workspace);

using EnsembleObserver = std::function<void(std::size_t step, const ParticleEnsemble&)>;

/// Forward Euler loop over round(horizon/dt) steps with the per-step
/// subsample policy above; observer semantics match run_micro.
ParticleEnsemble run_meanfield(ParticleEnsemble initial, double horizon, double dt,
                               const KernelSpec& kernel, const ControlConfig* control,
                               const MfmcConfig& cfg, Rng& rng,
                               const EnsembleObserver& observer = {});

/// Mass histogram over [lo, hi): bin b covers [lo + b*d, lo + (b+1)*d) with
/// d = (hi-lo)/bins; particles exactly at hi land in the last bin; mass
/// outside the range is reported separately.
struct HistogramResult {
    std::vector<double> bin_mass;
    double overflow = 0.0;
};

HistogramResult histogram(const ParticleEnsemble& ensemble, double lo, double hi,
                          std::size_t bins);

}  // namespace steer
