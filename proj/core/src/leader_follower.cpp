#include "steer/leader_follower.hpp"

#include <cmath>
#include <string>

#include "steer/errors.hpp"
#include "steer/micro.hpp"

namespace steer {

void validate(const PopulationSplit& split) {
    if (split.n_followers < 1) throw ValidationError("lf.n_followers must be >= 1");
    if (split.n_leaders < 1) throw ValidationError("lf.n_leaders must be >= 1");
    if (!(split.rho_f > 0.0 && split.rho_f < 1.0)) {
        throw ValidationError("lf.rho_f must lie strictly in (0,1), got " +
                              std::to_string(split.rho_f));
    }
    if (!(split.rho_l > 0.0 && split.rho_l < 1.0)) {
        throw ValidationError("lf.rho_l must lie strictly in (0,1), got " +
                              std::to_string(split.rho_l));
    }
    if (std::abs(split.rho_f + split.rho_l - 1.0) > 1e-12) {
        throw ValidationError("lf.rho_f + lf.rho_l must equal 1 (got " +
                              std::to_string(split.rho_f + split.rho_l) + ")");
    }
}

PopulationSplit make_split(std::size_t n_followers, std::size_t n_leaders, double rho_f,
                           double rho_l) {
    PopulationSplit split{n_followers, n_leaders, rho_f, rho_l};
    validate(split);
    return split;
}

void validate(const HybridState& state, const PopulationSplit& split) {
    validate(split);
    validate(state.followers);
    if (state.leaders.size() != split.n_leaders) {
        throw ValidationError("hybrid state has " + std::to_string(state.leaders.size()) +
                              " leaders, split expects " + std::to_string(split.n_leaders));
    }
    if (std::abs(state.followers.total_mass() - split.rho_f) > 1e-12) {
        throw ValidationError("follower ensemble mass " +
                              std::to_string(state.followers.total_mass()) +
                              " differs from rho_f = " + std::to_string(split.rho_f));
    }
}

LfVelocities micro_lf_rhs(std::span<const double> followers, std::span<const double> leaders,
                          const PopulationSplit& split, const KernelSpec& kernel, double k,
                          double c) {
    if (followers.size() != split.n_followers || leaders.size() != split.n_leaders) {
        throw ValidationError("micro_lf_rhs: position counts do not match the population split");
    }
    const double wf = split.omega_f();
    const double wl = split.omega_l();
    const double u = k * (wf * deviation_sum(followers, c) + wl * deviation_sum(leaders, c));

    LfVelocities vel;
    vel.followers.resize(followers.size());
    vel.leaders.resize(leaders.size());

    const std::size_t nf = followers.size();
#pragma omp parallel for schedule(static) if (nf > 128)
    for (std::size_t i = 0; i < nf; ++i) {
        vel.followers[i] = wf * drift_sum(kernel, followers[i], followers) +
                           wl * drift_sum(kernel, followers[i], leaders);
    }
    for (std::size_t i = 0; i < leaders.size(); ++i) {
        vel.leaders[i] = wf * drift_sum(kernel, leaders[i], followers) +
                         wl * drift_sum(kernel, leaders[i], leaders) + u;
    }
    return vel;
}

LfVelocities hybrid_rhs(const HybridState& state, const PopulationSplit& split,
                        const KernelSpec& kernel, double k, double c,
                        std::span<const std::size_t> subsample) {
    validate(state, split);
    const std::span<const double> leaders{state.leaders};
    const double wl = split.omega_l();
    // m1[nu] - rho_f * c, evaluated as the mass-weighted deviation sum so the
    // full-subsample hybrid reproduces the microscopic run bit-for-bit.
    const double follower_dev = state.followers.weight * deviation_sum(state.followers.particles, c);
    const double u = k * (follower_dev + wl * deviation_sum(leaders, c));

    LfVelocities vel;
    vel.followers.resize(state.followers.particles.size());
    vel.leaders.resize(leaders.size());

    const std::size_t nf = state.followers.particles.size();
    const std::size_t work = nf * subsample.size();
#pragma omp parallel for schedule(static) if (work > 16384)
    for (std::size_t i = 0; i < nf; ++i) {
        const double y = state.followers.particles[i];
        vel.followers[i] = interaction_field(state.followers, kernel, subsample, y) +
                           wl * drift_sum(kernel, y, leaders);
    }
    for (std::size_t i = 0; i < leaders.size(); ++i) {
        vel.leaders[i] = interaction_field(state.followers, kernel, subsample, leaders[i]) +
                         wl * drift_sum(kernel, leaders[i], leaders) + u;
    }
    return vel;
}

LfVelocities hybrid_rhs(const HybridState& state, const PopulationSplit& split,
                        const KernelSpec& kernel, double k, double c, const MfmcConfig& cfg,
                        Rng& rng) {
    MfmcWorkspace workspace;
    rng.sample_without_replacement(state.followers.particles.size(), cfg.n_sample,
                                   workspace.pool, workspace.subsample);
    return hybrid_rhs(state, split, kernel, k, c, workspace.subsample);
}

MicroLfState run_micro_lf(MicroLfState initial, const PopulationSplit& split,
                          const KernelSpec& kernel, double k, double c, double horizon,
                          double dt, const LfObserver& observer) {
    validate(kernel);
    validate(split);
    const std::size_t steps = step_count(horizon, dt);
    check_euler_guard(dt, kernel.p_bar, std::abs(k));

    MicroLfState state = std::move(initial);
    if (observer) observer(0, state.followers, state.leaders, state.time);
    for (std::size_t step = 1; step <= steps; ++step) {
        const LfVelocities vel = micro_lf_rhs(state.followers, state.leaders, split, kernel, k, c);
        for (std::size_t i = 0; i < state.followers.size(); ++i) {
            state.followers[i] += dt * vel.followers[i];
        }
        for (std::size_t i = 0; i < state.leaders.size(); ++i) {
            state.leaders[i] += dt * vel.leaders[i];
        }
        state.time += dt;
        detail::ensure_finite(state.followers, state.time, step);
        detail::ensure_finite(state.leaders, state.time, step);
        if (observer) observer(step, state.followers, state.leaders, state.time);
    }
    return state;
}

HybridState run_hybrid(HybridState initial, const PopulationSplit& split,
                       const KernelSpec& kernel, double k, double c, const MfmcConfig& cfg,
                       Rng& rng, double horizon, double dt, const HybridObserver& observer) {
    validate(kernel);
    validate(initial, split);
    if (cfg.n_sample < 1 || cfg.n_sample > initial.followers.particles.size()) {
        throw ValidationError("mfmc.n_sample must lie in [1, follower particle count]");
    }
    const std::size_t steps = step_count(horizon, dt);
    check_euler_guard(dt, kernel.p_bar, std::abs(k));

    HybridState state = std::move(initial);
    MfmcWorkspace workspace;
    if (observer) observer(0, state);
    for (std::size_t step = 1; step <= steps; ++step) {
        rng.sample_without_replacement(state.followers.particles.size(), cfg.n_sample,
                                       workspace.pool, workspace.subsample);
        const LfVelocities vel = hybrid_rhs(state, split, kernel, k, c, workspace.subsample);
        for (std::size_t i = 0; i < state.followers.particles.size(); ++i) {
            state.followers.particles[i] += dt * vel.followers[i];
        }
        for (std::size_t i = 0; i < state.leaders.size(); ++i) {
            state.leaders[i] += dt * vel.leaders[i];
        }
        state.time += dt;
        state.followers.time = state.time;
        detail::ensure_finite(state.followers.particles, state.time, step);
        detail::ensure_finite(state.leaders, state.time, step);
        if (observer) observer(step, state);
    }
    return state;
}

}  // namespace steer
