#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "steer/meanfield.hpp"
#include "steer/micro.hpp"

namespace steer {

enum class LyapunovKind {
    kMicro,         // (1/N) sum (x_i - c)^2
    kMeanField,     // unit-mass particle quadrature
    kFollowerMicro, // omega_f-weighted follower sum
    kLeaderMicro,   // omega_l-weighted leader sum
    kFollowerMF,    // mass-rho_f follower density quadrature
    kLeaderHybrid,  // omega_l-weighted leader sum in the hybrid model
    kTotalLF,       // follower + leader total
};

const char* lyapunov_kind_name(LyapunovKind kind);

struct LyapunovSeries {
    std::vector<double> times;
    std::vector<double> values;
    LyapunovKind kind = LyapunovKind::kMicro;
};

/// Decay verdict for a recorded series against the rate beta.
/// max_violation is the largest relative excess over either bound
/// (value/bound - 1, clamped at 0); both flags compare it to the slack.
struct DecayCertificate {
    double beta = 0.0;
    bool envelope_ok = false;
    bool monotone_ok = false;
    double max_violation = 0.0;
};

/// (1/N) sum_i (x_i - c)^2.
double lyap_micro(const AgentState& state, double c);
double lyap_micro(std::span<const double> positions, double c);

/// weight * sum_j (y_j - c)^2: particle quadrature of the density integral
/// (mass 1 for a probability density, rho_f for the follower sub-density).
double lyap_ensemble(const ParticleEnsemble& ensemble, double c);

/// omega_l * sum_i (x_i - c)^2 over the leader positions; serves both the
/// microscopic and the hybrid leader functionals, which share this formula.
double lyap_leaders(std::span<const double> leaders, double omega_l, double c);

/// (4 p_bar - 2|k|) * sqrt(omega_f * omega_l) / 2.
double decay_rate_micro(double p_bar, double k, double omega_f, double omega_l);

/// (4 p_bar - 2|k|) / 2.
double decay_rate_hybrid(double p_bar, double k);

/// l0 * exp(-|beta| t) per time; warns on stderr (and still evaluates) when
/// beta >= 0, where the envelope carries no decay guarantee.
std::vector<double> decay_envelope(double l0, double beta, std::span<const double> times);

/// monotone_ok  iff values[i+1] <= values[i] * (1 + slack) for all i;
/// envelope_ok  iff values[i] <= values[0] * exp(-|beta| t_i) * (1 + slack).
/// The default slack absorbs forward-Euler discretization error while the
/// values traverse many orders of magnitude.
DecayCertificate certify(const LyapunovSeries& series, double beta, double slack = 1e-6);

}  // namespace steer
