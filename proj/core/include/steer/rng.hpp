#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "steer/errors.hpp"

namespace steer {

/// Deterministic random stream: std::mt19937_64 behind a documented draw
/// discipline, so simulations are reproducible bit-for-bit from the seed.
///
/// Draw accounting (one "raw draw" = one 64-bit generator output):
///   unit(), uniform(), pick_index()            -> 1 raw draw each
///   sample_without_replacement(n, k, out)      -> exactly k raw draws
///
/// Uniform doubles use the top 53 bits of the raw output, so values are
/// identical on every conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double unit() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        double v = lo + (hi - lo) * unit();
        if (v >= hi) v = std::nextafter(hi, lo);  // guard the open bound against rounding
        return v;
    }

    /// Uniform index in [0, n).
    std::size_t pick_index(std::size_t n) {
        if (n == 0) throw ValidationError("pick_index: empty range");
        auto idx = static_cast<std::size_t>(unit() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    /// k distinct indices drawn uniformly from [0, n), written to `out` in
    /// ascending order. Partial Fisher-Yates over a caller-provided pool
    /// buffer (resized/reset here); consumes exactly k raw draws.
    void sample_without_replacement(std::size_t n, std::size_t k,
                                    std::vector<std::size_t>& pool,
                                    std::vector<std::size_t>& out) {
        if (k == 0) throw ValidationError("subsample size must be >= 1");
        if (k > n) throw ValidationError("subsample size exceeds population size");
        pool.resize(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        out.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t span_left = n - i;
            std::size_t j = i + static_cast<std::size_t>(unit() * static_cast<double>(span_left));
            if (j >= n) j = n - 1;
            std::swap(pool[i], pool[j]);
            out[i] = pool[i];
        }
        std::sort(out.begin(), out.end());
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace steer
