#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "steer/kernel.hpp"
#include "steer/meanfield.hpp"
#include "steer/rng.hpp"

namespace steer {

/// Disjoint follower/leader populations with mass fractions rho_f + rho_l = 1.
/// Interaction weights are omega_f = rho_f/N_f and omega_l = rho_l/N_l.
struct PopulationSplit {
    std::size_t n_followers = 49;
    std::size_t n_leaders = 1;
    double rho_f = 0.9;
    double rho_l = 0.1;

    double omega_f() const { return rho_f / static_cast<double>(n_followers); }
    double omega_l() const { return rho_l / static_cast<double>(n_leaders); }
};

void validate(const PopulationSplit& split);
PopulationSplit make_split(std::size_t n_followers, std::size_t n_leaders, double rho_f,
                           double rho_l);

/// Follower density as a particle ensemble (total mass rho_f) coupled to
/// microscopic leader positions.
struct HybridState {
    ParticleEnsemble followers;
    std::vector<double> leaders;
    double time = 0.0;
};

void validate(const HybridState& state, const PopulationSplit& split);

struct LfVelocities {
    std::vector<double> followers;
    std::vector<double> leaders;
};

/// Fully microscopic weighted dynamics: followers feel the omega-weighted
/// kernel sums over both groups; leaders additionally feel
/// k * (omega_f sum_F (x_j - c) + omega_l sum_L (x_j - c)).
LfVelocities micro_lf_rhs(std::span<const double> followers, std::span<const double> leaders,
                          const PopulationSplit& split, const KernelSpec& kernel, double k,
                          double c);

/// Hybrid dynamics: the follower field over the follower density is
/// estimated on `subsample` (shared by followers and leaders within the
/// step); the leader sums stay exact. The leader control term is the
/// mass-weighted deviation of the follower density plus the weighted leader
/// deviations.
LfVelocities hybrid_rhs(const HybridState& state, const PopulationSplit& split,
                        const KernelSpec& kernel, double k, double c,
                        std::span<const std::size_t> subsample);

/// Draws one subsample (cfg.n_sample raw draws) and evaluates the hybrid rhs.
LfVelocities hybrid_rhs(const HybridState& state, const PopulationSplit& split,
                        const KernelSpec& kernel, double k, double c, const MfmcConfig& cfg,
                        Rng& rng);

struct MicroLfState {
    std::vector<double> followers;
    std::vector<double> leaders;
    double time = 0.0;
};

using LfObserver =
    std::function<void(std::size_t step, std::span<const double> followers,
                       std::span<const double> leaders, double time)>;

/// Forward Euler on the coupled system: one synchronized rhs evaluation per
/// step, both populations advanced together (no operator splitting).
MicroLfState run_micro_lf(MicroLfState initial, const PopulationSplit& split,
                          const KernelSpec& kernel, double k, double c, double horizon,
                          double dt, const LfObserver& observer = {});

using HybridObserver = std::function<void(std::size_t step, const HybridState&)>;

HybridState run_hybrid(HybridState initial, const PopulationSplit& split,
                       const KernelSpec& kernel, double k, double c, const MfmcConfig& cfg,
                       Rng& rng, double horizon, double dt,
                       const HybridObserver& observer = {});

}  // namespace steer
