#include "steer/lyapunov.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "steer/errors.hpp"
#include "steer/kernel.hpp"

namespace steer {

const char* lyapunov_kind_name(LyapunovKind kind) {
    switch (kind) {
        case LyapunovKind::kMicro: return "micro";
        case LyapunovKind::kMeanField: return "mean_field";
        case LyapunovKind::kFollowerMicro: return "follower_micro";
        case LyapunovKind::kLeaderMicro: return "leader_micro";
        case LyapunovKind::kFollowerMF: return "follower_mf";
        case LyapunovKind::kLeaderHybrid: return "leader_hybrid";
        case LyapunovKind::kTotalLF: return "total_lf";
    }
    return "unknown";
}

double lyap_micro(std::span<const double> positions, double c) {
    if (positions.empty()) throw ValidationError("lyap_micro: empty state");
    // Same scale-times-sum shape as lyap_ensemble so a unit-mass ensemble
    // matches exactly.
    const double scale = 1.0 / static_cast<double>(positions.size());
    return scale * squared_deviation_sum(positions, c);
}

double lyap_micro(const AgentState& state, double c) {
    return lyap_micro(std::span<const double>{state.positions}, c);
}

double lyap_ensemble(const ParticleEnsemble& ensemble, double c) {
    if (ensemble.particles.empty()) throw ValidationError("lyap_ensemble: empty ensemble");
    return ensemble.weight * squared_deviation_sum(ensemble.particles, c);
}

double lyap_leaders(std::span<const double> leaders, double omega_l, double c) {
    if (leaders.empty()) throw ValidationError("lyap_leaders: no leaders");
    if (!(omega_l > 0.0)) throw ValidationError("lyap_leaders: omega_l must be positive");
    return omega_l * squared_deviation_sum(leaders, c);
}

double decay_rate_micro(double p_bar, double k, double omega_f, double omega_l) {
    return (4.0 * p_bar - 2.0 * std::abs(k)) * std::sqrt(omega_f * omega_l) / 2.0;
}

double decay_rate_hybrid(double p_bar, double k) {
    return (4.0 * p_bar - 2.0 * std::abs(k)) / 2.0;
}

std::vector<double> decay_envelope(double l0, double beta, std::span<const double> times) {
    if (beta >= 0.0) {
        std::cerr << "steer: warning: decay rate beta = " << beta
                  << " is nonnegative; the exponential envelope carries no decay guarantee\n";
    }
    std::vector<double> env(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        env[i] = l0 * std::exp(-std::abs(beta) * times[i]);
    }
    return env;
}

namespace {

/// value/bound - 1 as a relative excess; 0 when under the bound.
double relative_excess(double value, double bound) {
    if (value <= bound) return 0.0;
    if (bound > 0.0) return value / bound - 1.0;
    return std::numeric_limits<double>::infinity();
}

}  // namespace

DecayCertificate certify(const LyapunovSeries& series, double beta, double slack) {
    if (series.values.empty()) throw ValidationError("certify: empty series");
    if (series.times.size() != series.values.size()) {
        throw ValidationError("certify: times/values size mismatch");
    }

    DecayCertificate cert;
    cert.beta = beta;
    cert.monotone_ok = true;
    cert.envelope_ok = true;

    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < series.values.size(); ++i) {
        const double excess = relative_excess(series.values[i + 1], series.values[i]);
        worst = std::max(worst, excess);
        if (excess > slack) cert.monotone_ok = false;
    }
    const double l0 = series.values.front();
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double bound = l0 * std::exp(-std::abs(beta) * series.times[i]);
        const double excess = relative_excess(series.values[i], bound);
        worst = std::max(worst, excess);
        if (excess > slack) cert.envelope_ok = false;
    }
    cert.max_violation = worst;
    return cert;
}

}  // namespace steer
