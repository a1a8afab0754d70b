#include "steer/meanfield.hpp"

#include <cmath>
#include <string>

#include "steer/errors.hpp"

namespace steer {

void validate(const ParticleEnsemble& ensemble) {
    if (ensemble.particles.empty()) throw ValidationError("particle ensemble is empty");
    if (!(ensemble.weight > 0.0) || !std::isfinite(ensemble.weight)) {
        throw ValidationError("particle weight must be positive and finite");
    }
    for (const double y : ensemble.particles) {
        if (!std::isfinite(y)) throw ValidationError("particle ensemble holds non-finite positions");
    }
}

double interaction_field(const ParticleEnsemble& ensemble, const KernelSpec& kernel,
                         std::span<const std::size_t> subsample, double at) {
    if (subsample.empty()) throw ValidationError("interaction_field: empty subsample");
    const double count = static_cast<double>(ensemble.particles.size());
    const double scale = ensemble.weight * (count / static_cast<double>(subsample.size()));
    return scale * drift_sum(kernel, at, ensemble.particles, subsample);
}

double first_moment(const ParticleEnsemble& ensemble) {
    if (ensemble.particles.empty()) throw ValidationError("first_moment: empty ensemble");
    double sum = 0.0;
    for (const double y : ensemble.particles) sum += y;
    return ensemble.weight * sum;
}

void mfmc_step(ParticleEnsemble& ensemble, double dt, const KernelSpec& kernel,
               const ControlConfig* control, const MfmcConfig& cfg, Rng& rng,
               MfmcWorkspace& workspace) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive, got " + std::to_string(dt));
    const std::size_t n = ensemble.particles.size();
    if (n == 0) throw ValidationError("mfmc_step: empty ensemble");
    if (control && !control->actuation.empty() && control->actuation.size() != n) {
        throw ValidationError("control.actuation has " + std::to_string(control->actuation.size()) +
                              " entries for " + std::to_string(n) + " particles");
    }

    rng.sample_without_replacement(n, cfg.n_sample, workspace.pool, workspace.subsample);
    workspace.velocity.resize(n);

    // Control drift uses the exact full-ensemble moment, not the subsample;
    // evaluated as the weighted deviation sum (equal to m1 - c for a unit
    // mass) so consensus at c is an exact fixed point and the full-sample
    // step reproduces the microscopic one bit-for-bit.
    const double u =
        control
            ? control->k * (ensemble.weight * deviation_sum(ensemble.particles, control->c))
            : 0.0;
    const double* b = (control && !control->actuation.empty()) ? control->actuation.data() : nullptr;
    const bool controlled = control != nullptr;
    const std::span<const std::size_t> sub{workspace.subsample};
    const std::size_t work = n * sub.size();

#pragma omp parallel for schedule(static) if (work > 16384)
    for (std::size_t i = 0; i < n; ++i) {
        double v = interaction_field(ensemble, kernel, sub, ensemble.particles[i]);
        if (controlled) v += (b ? b[i] : 1.0) * u;
        workspace.velocity[i] = v;
    }

    for (std::size_t i = 0; i < n; ++i) {
        ensemble.particles[i] += dt * workspace.velocity[i];
    }
    ensemble.time += dt;
}

ParticleEnsemble run_meanfield(ParticleEnsemble initial, double horizon, double dt,
                               const KernelSpec& kernel, const ControlConfig* control,
                               const MfmcConfig& cfg, Rng& rng, const EnsembleObserver& observer) {
    validate(kernel);
    validate(initial);
    if (cfg.n_sample < 1 || cfg.n_sample > initial.particles.size()) {
        throw ValidationError("mfmc.n_sample must lie in [1, particle count]");
    }
    const std::size_t steps = step_count(horizon, dt);
    check_euler_guard(dt, kernel.p_bar, control ? std::abs(control->k) : 0.0);

    ParticleEnsemble ensemble = std::move(initial);
    MfmcWorkspace workspace;
    if (observer) observer(0, ensemble);
    for (std::size_t step = 1; step <= steps; ++step) {
        mfmc_step(ensemble, dt, kernel, control, cfg, rng, workspace);
        detail::ensure_finite(ensemble.particles, ensemble.time, step);
        if (observer) observer(step, ensemble);
    }
    return ensemble;
}

HistogramResult histogram(const ParticleEnsemble& ensemble, double lo, double hi,
                          std::size_t bins) {
    if (!(lo < hi)) throw ValidationError("histogram: need lo < hi");
    if (bins < 1) throw ValidationError("histogram: need at least one bin");
    HistogramResult result;
    result.bin_mass.assign(bins, 0.0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (const double y : ensemble.particles) {
        if (y < lo || y > hi) {
            result.overflow += ensemble.weight;
            continue;
        }
        std::size_t b = (y == hi) ? bins - 1
                                  : static_cast<std::size_t>((y - lo) / width);
        if (b >= bins) b = bins - 1;  // guard rounding at the upper edge
        result.bin_mass[b] += ensemble.weight;
    }
    return result;
}

}  // namespace steer
