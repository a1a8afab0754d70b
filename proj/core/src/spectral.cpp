#include "steer/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "steer/errors.hpp"

namespace steer {

namespace {

double sum_of(std::span<const double> xs) {
    double acc = 0.0;
    for (const double x : xs) acc += x;
    return acc;
}

double inf_norm(std::span<const double> xs) {
    double m = 0.0;
    for (const double x : xs) m = std::max(m, std::abs(x));
    return m;
}

/// ||M v - lambda v||_inf / ||v||_inf (0/0 counts as 0).
double eigenpair_residual(const Matrix& m, std::span<const double> v, double lambda) {
    std::vector<double> mv = matvec(m, v);
    for (std::size_t i = 0; i < mv.size(); ++i) mv[i] -= lambda * v[i];
    const double denom = inf_norm(v);
    const double num = inf_norm(mv);
    if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

}  // namespace

std::vector<double> matvec(const Matrix& m, std::span<const double> v) {
    if (v.size() != m.cols) throw ValidationError("matvec dimension mismatch");
    std::vector<double> out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

Matrix build_laplacian(std::size_t n, double p_bar) {
    if (n < 2) throw ValidationError("laplacian needs n >= 2, got " + std::to_string(n));
    if (!(p_bar > 0.0)) throw ValidationError("p_bar must be positive");
    Matrix a(n, n);
    const double nd = static_cast<double>(n);
    const double off = p_bar / nd;
    const double diag = p_bar * (1.0 - nd) / nd;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j) ? diag : off;
    }
    return a;
}

Matrix closed_loop(const Matrix& a, std::span<const double> b, double k) {
    if (a.rows != a.cols) throw ValidationError("closed_loop expects a square matrix");
    if (b.size() != a.rows) throw ValidationError("closed_loop: B has " + std::to_string(b.size()) +
                                                  " entries for an " + std::to_string(a.rows) +
                                                  "-state system");
    Matrix m = a;
    const double nd = static_cast<double>(a.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double gain = k * b[i] / nd;
        for (std::size_t j = 0; j < m.cols; ++j) m(i, j) += gain;
    }
    return m;
}

bool check_stabilizable(std::span<const double> b) {
    return sum_of(b) != 0.0;
}

double select_gain(std::span<const double> b, double magnitude) {
    if (!(magnitude > 0.0)) throw ValidationError("gain magnitude must be positive");
    const double s = sum_of(b);
    if (s == 0.0) {
        throw ValidationError("actuation pattern is not stabilizable: sum of B components is zero");
    }
    return s > 0.0 ? -magnitude : magnitude;
}

SpectralReport analytic_spectrum(std::size_t n, double p_bar, std::span<const double> b, double k) {
    if (n < 2) throw ValidationError("analytic_spectrum needs n >= 2");
    if (b.size() != n) throw ValidationError("analytic_spectrum: B size mismatch");
    if (!(p_bar > 0.0)) throw ValidationError("p_bar must be positive");

    SpectralReport report;
    report.n = n;
    report.p_bar = p_bar;
    report.k = k;

    const double nd = static_cast<double>(n);
    const double sum_b = sum_of(b);
    // (k/N) sum_j b_j, arranged so that the two canonical actuations come out
    // exact: B = 1 gives lambda1 == k, B = e_j gives lambda1 == k/N.
    report.lambda1_closed = (sum_b == nd) ? k : (k * sum_b) / nd;
    report.stabilizable = sum_b != 0.0;
    report.asymptotically_stable = report.stabilizable && report.lambda1_closed < 0.0;

    report.laplacian_eigenvalues.assign(n - 1, -p_bar);
    report.laplacian_eigenvalues.push_back(0.0);
    report.closed_loop_eigenvalues.assign(n - 1, -p_bar);
    report.closed_loop_eigenvalues.push_back(report.lambda1_closed);
    std::sort(report.closed_loop_eigenvalues.begin(), report.closed_loop_eigenvalues.end());

    const Matrix a = build_laplacian(n, p_bar);
    const Matrix m = closed_loop(a, b, k);

    // lambda_1 with eigenvector v1 = 1 + (k/p_bar) B.
    std::vector<double> v1(n);
    for (std::size_t i = 0; i < n; ++i) v1[i] = 1.0 + (k / p_bar) * b[i];
    double worst = eigenpair_residual(m, v1, report.lambda1_closed);

    // N-1 eigenvalues -p_bar with v_i = e_1 - e_i; M v = column_1 - column_i.
    std::vector<double> mv(n);
    for (std::size_t i = 1; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double vr = (r == 0) ? 1.0 : (r == i ? -1.0 : 0.0);
            const double res = (m(r, 0) - m(r, i)) - (-p_bar) * vr;
            norm = std::max(norm, std::abs(res));
        }
        worst = std::max(worst, norm);  // ||v||_inf = 1
    }

    report.max_residual = worst;
    report.residuals_ok = worst <= SpectralReport::residual_tolerance;
    return report;
}

}  // namespace steer
