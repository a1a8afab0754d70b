#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "steer/errors.hpp"
#include "steer/spectral.hpp"

using namespace steer;

TEST_CASE("laplacian entries for n = 2 and n = 3") {
    const Matrix a2 = build_laplacian(2, 0.04);
    CHECK(a2(0, 0) == doctest::Approx(-0.02).epsilon(1e-14));
    CHECK(a2(0, 1) == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(a2(1, 0) == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(a2(1, 1) == doctest::Approx(-0.02).epsilon(1e-14));

    const Matrix a3 = build_laplacian(3, 0.04);
    CHECK(a3(0, 0) == doctest::Approx(0.04 * (1.0 - 3.0) / 3.0).epsilon(1e-15));
    CHECK(a3(0, 1) == doctest::Approx(0.04 / 3.0).epsilon(1e-15));
}

TEST_CASE("laplacian rows sum to zero up to last-ulp rounding") {
    for (const std::size_t n : {2u, 3u, 5u, 50u, 137u}) {
        const Matrix a = build_laplacian(n, 0.04);
        const std::vector<double> ones(n, 1.0);
        for (const double r : matvec(a, ones)) CHECK(std::abs(r) <= 1e-15);
    }
}

TEST_CASE("laplacian rejects n < 2") {
    CHECK_THROWS_AS(build_laplacian(1, 0.04), ValidationError);
}

TEST_CASE("closed loop with zero gain is the open loop") {
    const Matrix a = build_laplacian(4, 0.04);
    const std::vector<double> b(4, 1.0);
    const Matrix m = closed_loop(a, b, 0.0);
    CHECK(m.data == a.data);
}

TEST_CASE("closed loop entries for n = 2") {
    const Matrix a = build_laplacian(2, 0.04);
    const std::vector<double> ones{1.0, 1.0};
    const Matrix m = closed_loop(a, ones, -0.1);  // each entry gains -0.05
    CHECK(m(0, 0) == doctest::Approx(-0.07).epsilon(1e-14));
    CHECK(m(0, 1) == doctest::Approx(-0.03).epsilon(1e-14));
    CHECK(m(1, 0) == doctest::Approx(-0.03).epsilon(1e-14));
    CHECK(m(1, 1) == doctest::Approx(-0.07).epsilon(1e-14));

    const std::vector<double> sparse{1.0, 0.0};
    const Matrix s = closed_loop(a, sparse, -0.1);
    CHECK(s(0, 0) == doctest::Approx(-0.07).epsilon(1e-14));
    CHECK(s(1, 0) == a(1, 0));
    CHECK(s(1, 1) == a(1, 1));
}

TEST_CASE("closed loop with uniform actuation stays symmetric") {
    const Matrix a = build_laplacian(7, 0.04);
    const std::vector<double> ones(7, 1.0);
    const Matrix m = closed_loop(a, ones, -0.1);
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < i; ++j) CHECK(m(i, j) == m(j, i));
    }
}

TEST_CASE("closed loop rejects mismatched dimensions") {
    const Matrix a = build_laplacian(3, 0.04);
    const std::vector<double> b{1.0, 1.0};
    CHECK_THROWS_AS(closed_loop(a, b, -0.1), ValidationError);
}

TEST_CASE("stabilizability is the exact nonzero-sum test") {
    CHECK(check_stabilizable(std::vector<double>{1.0, 1.0, 1.0}));
    CHECK(check_stabilizable(std::vector<double>{0.0, 1.0, 0.0}));
    CHECK_FALSE(check_stabilizable(std::vector<double>{1.0, -1.0}));
    CHECK_FALSE(check_stabilizable(std::vector<double>{0.0, 0.0}));
}

TEST_CASE("select_gain follows the sign rule") {
    const std::vector<double> ones(50, 1.0);
    CHECK(select_gain(ones, 0.1) == -0.1);
    const std::vector<double> negative{-1.0, -1.0};
    CHECK(select_gain(negative, 0.1) == 0.1);
    const std::vector<double> cancel{1.0, -1.0};
    CHECK_THROWS_AS(select_gain(cancel, 0.1), ValidationError);
    CHECK_THROWS_AS(select_gain(ones, 0.0), ValidationError);
}

TEST_CASE("analytic spectrum: uniform actuation moves one eigenvalue to k") {
    for (const std::size_t n : {2u, 5u, 50u}) {
        const std::vector<double> ones(n, 1.0);
        const SpectralReport report = analytic_spectrum(n, 0.04, ones, -0.1);
        CHECK(report.lambda1_closed == -0.1);
        CHECK(report.stabilizable);
        CHECK(report.asymptotically_stable);
        CHECK(report.residuals_ok);
        CHECK(report.max_residual <= 1e-12);
        REQUIRE(report.closed_loop_eigenvalues.size() == n);
        CHECK(std::count(report.closed_loop_eigenvalues.begin(),
                         report.closed_loop_eigenvalues.end(), -0.04) ==
              static_cast<std::ptrdiff_t>(n - 1));
        CHECK(std::count(report.closed_loop_eigenvalues.begin(),
                         report.closed_loop_eigenvalues.end(), -0.1) == 1);
    }
}

TEST_CASE("analytic spectrum: single-agent actuation gives k/N") {
    const std::size_t n = 50;
    std::vector<double> b(n, 0.0);
    b[7] = 1.0;
    const SpectralReport report = analytic_spectrum(n, 0.04, b, -0.1);
    CHECK(report.lambda1_closed == -0.1 / 50.0);
    CHECK(report.lambda1_closed == doctest::Approx(-0.002));
    CHECK(report.stabilizable);
    CHECK(report.asymptotically_stable);
    CHECK(report.max_residual <= 1e-12);
}

TEST_CASE("analytic spectrum: zero gain keeps the laplacian spectrum") {
    const std::vector<double> ones(5, 1.0);
    const SpectralReport report = analytic_spectrum(5, 0.04, ones, 0.0);
    CHECK(report.lambda1_closed == 0.0);
    CHECK_FALSE(report.asymptotically_stable);
    CHECK(report.laplacian_eigenvalues == report.closed_loop_eigenvalues);
}

TEST_CASE("laplacian spectrum verified through its analytic eigenvectors") {
    for (const std::size_t n : {2u, 5u, 50u}) {
        const Matrix a = build_laplacian(n, 0.04);
        // v = 1: eigenvalue 0 (residual = row sums)
        const std::vector<double> ones(n, 1.0);
        for (const double r : matvec(a, ones)) CHECK(std::abs(r) <= 1e-12);
        // v = e_1 - e_i: eigenvalue -p_bar
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<double> v(n, 0.0);
            v[0] = 1.0;
            v[i] = -1.0;
            const std::vector<double> av = matvec(a, v);
            for (std::size_t r = 0; r < n; ++r) {
                CHECK(std::abs(av[r] - (-0.04) * v[r]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("stability verdict matches the sign product rule") {
    const std::vector<double> b{1.0, 1.0, 0.0};
    CHECK(analytic_spectrum(3, 0.04, b, -0.1).asymptotically_stable);
    CHECK_FALSE(analytic_spectrum(3, 0.04, b, 0.1).asymptotically_stable);
    const std::vector<double> neg{-1.0, -1.0, 0.0};
    CHECK(analytic_spectrum(3, 0.04, neg, 0.1).asymptotically_stable);
    const std::vector<double> cancel{1.0, -1.0, 0.0};
    CHECK_FALSE(analytic_spectrum(3, 0.04, cancel, -0.1).asymptotically_stable);
}
