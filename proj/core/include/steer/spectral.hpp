#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace steer {

/// Minimal dense row-major square-capable matrix; all spectra here are known
/// in closed form, so no general eigensolver is needed or wanted.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

std::vector<double> matvec(const Matrix& m, std::span<const double> v);

/// Consensus Laplacian at the uniform-interaction linearization:
/// A_ii = p_bar (1-N)/N, A_ij = p_bar/N. Requires n >= 2.
Matrix build_laplacian(std::size_t n, double p_bar);

/// A + B (k/N) 1^T: entry (i,j) gains k*b_i/N.
Matrix closed_loop(const Matrix& a, std::span<const double> b, double k);

/// Exact arithmetic on the input floats; no tolerance.
bool check_stabilizable(std::span<const double> b);

/// k = -magnitude * sign(sum b), so the controlled eigenvalue is negative.
/// Requires check_stabilizable(b).
double select_gain(std::span<const double> b, double magnitude);

struct SpectralReport {
    std::size_t n = 0;
    double p_bar = 0.0;
    double k = 0.0;
    std::vector<double> laplacian_eigenvalues;    // sorted ascending: {-p_bar (x N-1), 0}
    std::vector<double> closed_loop_eigenvalues;  // sorted ascending
    double lambda1_closed = 0.0;                  // (k/N) sum_j b_j
    bool stabilizable = false;
    bool asymptotically_stable = false;
    double max_residual = 0.0;  // max over eigenpairs of ||(A+BF)v - lambda v||_inf / ||v||_inf
    bool residuals_ok = false;  // all residuals <= residual_tolerance
    static constexpr double residual_tolerance = 1e-10;
};

/// Builds A and A+BF, evaluates the closed-form eigenstructure
///   lambda_1 = (k/N) sum_j b_j  with  v_1 = 1 + (k/p_bar) B,
///   lambda_i = -p_bar           with  v_i = e_1 - e_i  (i = 2..N),
/// and verifies every pair by its residual. residuals_ok = false signals an
/// implementation bug, not user error, so no exception is thrown for it.
SpectralReport analytic_spectrum(std::size_t n, double p_bar, std::span<const double> b, double k);

}  // namespace steer
