#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "steer/kernel.hpp"

namespace steer {

/// Positions of the N microscopic agents at one time instant.
struct AgentState {
    std::vector<double> positions;
    double time = 0.0;
};

/// Mean-deviation feedback u = k * (mean(x) - c), routed to agent i through
/// the channel b_i. An empty actuation vector means b = 1 for every agent.
struct ControlConfig {
    double k = -0.1;
    double c = 1.0;
    std::vector<double> actuation;
};

/// u = k * ((1/N) sum_j x_j - c).
double feedback(const AgentState& state, const ControlConfig& control);

/// dx_i/dt = (1/N) sum_j P(x_i,x_j)(x_j - x_i) + b_i * u.
/// Pass control = nullptr for the uncontrolled dynamics (u = 0).
void micro_rhs(const AgentState& state, const KernelSpec& kernel,
               const ControlConfig* control, std::span<double> velocity);
std::vector<double> micro_rhs(const AgentState& state, const KernelSpec& kernel,
                              const ControlConfig* control);

/// One forward Euler update. Rejects dt <= 0; throws BlowupError if the
/// resulting state is non-finite.
AgentState euler_step(const AgentState& state, double dt, const KernelSpec& kernel,
                      const ControlConfig* control);

/// Called with step index (0 = initial state) and the current state.
using MicroObserver = std::function<void(std::size_t step, const AgentState&)>;

/// Forward Euler over round(horizon/dt) steps. Invokes the observer on the
/// initial state and after every step. Enforces the explicit-Euler guard
/// dt * (p_bar + |k|) <= 0.5 and attaches the step index to blow-ups.
AgentState run_micro(AgentState initial, double horizon, double dt, const KernelSpec& kernel,
                     const ControlConfig* control, const MicroObserver& observer = {});

/// round(horizon/dt), validated: horizon > 0 and at least one step.
std::size_t step_count(double horizon, double dt);

/// Throws ValidationError when dt * (p_bar + |k|) > 0.5.
void check_euler_guard(double dt, double p_bar, double k_magnitude);

namespace detail {
/// Throws BlowupError naming `step` if any entry of xs is non-finite.
void ensure_finite(std::span<const double> xs, double time, std::size_t step);
}  // namespace detail

}  // namespace steer
