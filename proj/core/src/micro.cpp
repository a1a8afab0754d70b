#include "steer/micro.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "steer/errors.hpp"

namespace steer {

namespace detail {

void ensure_finite(std::span<const double> xs, double time, std::size_t step) {
    std::size_t bad = 0;
    std::size_t first = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i])) {
            if (bad == 0) first = i;
            ++bad;
        }
    }
    if (bad > 0) {
        throw BlowupError("state became non-finite at step " + std::to_string(step) +
                              " (t=" + std::to_string(time) + "): " + std::to_string(bad) +
                              " of " + std::to_string(xs.size()) +
                              " entries non-finite, first at index " + std::to_string(first),
                          step);
    }
}

}  // namespace detail

double feedback(const AgentState& state, const ControlConfig& control) {
    const std::size_t n = state.positions.size();
    if (n == 0) throw ValidationError("feedback requires at least one agent");
    // (k/N) sum_j (x_j - c): the deviation form of the mean feedback, so the
    // consensus state is an exact fixed point for every N and c.
    const double inv_n = 1.0 / static_cast<double>(n);
    return control.k * (inv_n * deviation_sum(state.positions, control.c));
}

void micro_rhs(const AgentState& state, const KernelSpec& kernel, const ControlConfig* control,
               std::span<double> velocity) {
    const std::size_t n = state.positions.size();
    if (n == 0) throw ValidationError("micro_rhs requires at least one agent");
    if (velocity.size() != n) throw ValidationError("velocity buffer size mismatch");
    if (control && !control->actuation.empty() && control->actuation.size() != n) {
        throw ValidationError("control.actuation has " + std::to_string(control->actuation.size()) +
                              " entries for " + std::to_string(n) + " agents");
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    const double u = control ? feedback(state, *control) : 0.0;
    const std::span<const double> xs{state.positions};
    const double* b = (control && !control->actuation.empty()) ? control->actuation.data() : nullptr;
    const bool controlled = control != nullptr;

#pragma omp parallel for schedule(static) if (n > 128)
    for (std::size_t i = 0; i < n; ++i) {
        double v = inv_n * drift_sum(kernel, xs[i], xs);
        if (controlled) v += (b ? b[i] : 1.0) * u;
        velocity[i] = v;
    }
}

std::vector<double> micro_rhs(const AgentState& state, const KernelSpec& kernel,
                              const ControlConfig* control) {
    std::vector<double> velocity(state.positions.size());
    micro_rhs(state, kernel, control, velocity);
    return velocity;
}

AgentState euler_step(const AgentState& state, double dt, const KernelSpec& kernel,
                      const ControlConfig* control) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive, got " + std::to_string(dt));
    AgentState next = state;
    const std::vector<double> velocity = micro_rhs(state, kernel, control);
    for (std::size_t i = 0; i < next.positions.size(); ++i) {
        next.positions[i] += dt * velocity[i];
    }
    next.time += dt;
    detail::ensure_finite(next.positions, next.time, 1);
    return next;
}

std::size_t step_count(double horizon, double dt) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive, got " + std::to_string(dt));
    if (!(horizon > 0.0)) throw ValidationError("horizon must be positive, got " + std::to_string(horizon));
    const auto steps = static_cast<long long>(std::llround(horizon / dt));
    if (steps < 1) throw ValidationError("horizon shorter than one step");
    return static_cast<std::size_t>(steps);
}

void check_euler_guard(double dt, double p_bar, double k_magnitude) {
    const double stiffness = dt * (p_bar + k_magnitude);
    if (stiffness > 0.5) {
        throw ValidationError("explicit Euler guard: dt*(p_bar+|k|) = " + std::to_string(stiffness) +
                              " exceeds 0.5; reduce dt or the gain");
    }
}

AgentState run_micro(AgentState initial, double horizon, double dt, const KernelSpec& kernel,
                     const ControlConfig* control, const MicroObserver& observer) {
    validate(kernel);
    const std::size_t steps = step_count(horizon, dt);
    check_euler_guard(dt, kernel.p_bar, control ? std::abs(control->k) : 0.0);

    AgentState state = std::move(initial);
    std::vector<double> velocity(state.positions.size());
    if (observer) observer(0, state);
    for (std::size_t step = 1; step <= steps; ++step) {
        micro_rhs(state, kernel, control, velocity);
        for (std::size_t i = 0; i < state.positions.size(); ++i) {
            state.positions[i] += dt * velocity[i];
        }
        state.time += dt;
        detail::ensure_finite(state.positions, state.time, step);
        if (observer) observer(step, state);
    }
    return state;
}

}  // namespace steer
