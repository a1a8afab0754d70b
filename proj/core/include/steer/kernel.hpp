#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "steer/errors.hpp"

namespace steer {

/// Interaction kernel families. Both are symmetric, bounded by p_bar and
/// strictly positive, which is what the decay results rely on; arbitrary
/// user callbacks are deliberately not supported.
enum class KernelFamily {
    kConstant,       // P(x,y) = p_bar everywhere (linear dynamics)
    kRationalDecay,  // P(x,y) = p_bar / (1 + (x-y)^2)^2
};

struct KernelSpec {
    KernelFamily family = KernelFamily::kRationalDecay;
    double p_bar = 0.04;  // peak strength, P(x,x) = p_bar > 0

    static KernelSpec constant(double p_bar);
    static KernelSpec rational_decay(double p_bar);
};

inline void validate(const KernelSpec& spec) {
    if (!(spec.p_bar > 0.0) || !std::isfinite(spec.p_bar)) {
        throw ValidationError("kernel.p_bar must be a positive finite real, got " +
                              std::to_string(spec.p_bar));
    }
}

inline KernelSpec KernelSpec::constant(double p_bar) {
    KernelSpec spec{KernelFamily::kConstant, p_bar};
    validate(spec);
    return spec;
}

inline KernelSpec KernelSpec::rational_decay(double p_bar) {
    KernelSpec spec{KernelFamily::kRationalDecay, p_bar};
    validate(spec);
    return spec;
}

/// P(x,y). Total on reals, exactly symmetric in (x,y): the distance enters
/// only through (x-y)^2, and negation is exact in floating point.
inline double kernel_eval(const KernelSpec& spec, double x, double y) {
    if (spec.family == KernelFamily::kConstant) {
        return spec.p_bar;
    }
    const double d = x - y;
    const double q = 1.0 + d * d;
    return spec.p_bar / (q * q);
}

/// Sum of P(at, pts[j]) * (pts[j] - at) over all j, ascending, one
/// accumulator. Every dynamics module funnels its interaction sums through
/// these two overloads so that paths required to agree (microscopic vs
/// full-subsample mean-field) perform identical floating-point operations.
inline double drift_sum(const KernelSpec& spec, double at, std::span<const double> pts) {
    double acc = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        acc += kernel_eval(spec, at, pts[j]) * (pts[j] - at);
    }
    return acc;
}

/// Same reduction restricted to `idx` (ascending iteration over the index
/// list; callers keep the list sorted).
inline double drift_sum(const KernelSpec& spec, double at, std::span<const double> pts,
                        std::span<const std::size_t> idx) {
    double acc = 0.0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
        const double y = pts[idx[m]];
        acc += kernel_eval(spec, at, y) * (y - at);
    }
    return acc;
}

/// Sum of (xs[j] - c), ascending.
inline double deviation_sum(std::span<const double> xs, double c) {
    double acc = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        acc += xs[j] - c;
    }
    return acc;
}

/// Sum of (xs[j] - c)^2, ascending.
inline double squared_deviation_sum(std::span<const double> xs, double c) {
    double acc = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double d = xs[j] - c;
        acc += d * d;
    }
    return acc;
}

inline KernelFamily parse_kernel_family(const std::string& name) {
    if (name == "constant") return KernelFamily::kConstant;
    if (name == "rational_decay") return KernelFamily::kRationalDecay;
    throw ValidationError("kernel.family must be \"constant\" or \"rational_decay\", got \"" +
                          name + "\"");
}

inline const char* kernel_family_name(KernelFamily family) {
    return family == KernelFamily::kConstant ? "constant" : "rational_decay";
}

}  // namespace steer
