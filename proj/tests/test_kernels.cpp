#include <doctest.h>

#include "haarint/kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace haarint;

namespace {

// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt, composite Simpson.
double bessel_j_integral(int n, double x) {
    const int N = 4000;
    const double h = std::numbers::pi / N;
    double s = 0;
    for (int i = 0; i <= N; ++i) {
        const double t = i * h;
        const double w = (i == 0 || i == N) ? 1 : (i % 2 ? 4 : 2);
        s += w * std::cos(n * t - x * std::sin(t));
    }
    return s * h / 3 / std::numbers::pi;
}

DMatrix random_antisymmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    DMatrix a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            a[i][j] = g(rng);
            a[j][i] = -a[i][j];
        }
    return a;
}

}  // namespace

TEST_CASE("half-integer Bessel kernels are elementary") {
    for (double x : {1e-3, 0.3, 1.0, 2.0, 2.5, 5.0, 9.75}) {
        CHECK(bessel_psi(0.5, x) == doctest::Approx(std::sin(x) / x).epsilon(1e-13));
        CHECK(bessel_psi(-0.5, x) == doctest::Approx(std::cos(x)).epsilon(1e-12));
        CHECK(bessel_psi(1.5, x) ==
              doctest::Approx(3 * (std::sin(x) - x * std::cos(x)) / (x * x * x)).epsilon(1e-9));
    }
    CHECK(bessel_psi(3.0, 0.0) == 1.0);
}

TEST_CASE("integer Bessel kernels match the integral representation") {
    for (int n = 0; n <= 6; ++n)
        for (double x : {0.5, 1.7, 3.0, 6.5}) {
            const double want = bessel_j_integral(n, x) / std::pow(x / 2, n);
            CHECK(bessel_phi(n, x) == doctest::Approx(want).epsilon(1e-10));
        }
    // phi_{-1}(x) = (x/2) J_{-1}(x) = -(x/2) J_1(x)
    CHECK(bessel_phi(-1, 2.2) == doctest::Approx(-1.1 * bessel_j_integral(1, 2.2)).epsilon(1e-10));
}

TEST_CASE("pfaffian squares to the determinant") {
    std::mt19937_64 rng(11);
    for (int n : {2, 4, 6, 8}) {
        for (int t = 0; t < 5; ++t) {
            const DMatrix a = random_antisymmetric(n, rng);
            const double pf = pfaffian(a);
            CHECK(pf * pf == doctest::Approx(determinant(a)).epsilon(1e-10));
        }
    }
    DMatrix a = random_antisymmetric(4, rng);
    CHECK(pfaffian(a) ==
          doctest::Approx(a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2]).epsilon(1e-13));
    CHECK_THROWS(pfaffian(random_antisymmetric(3, rng)));
    CHECK(determinant({{2, 1}, {7, 4}}) == doctest::Approx(1.0));
}

TEST_CASE("single column kernels collapse to Bessel") {
    for (int n = 1; n <= 5; ++n)
        for (double L : {0.1, 1.0, 3.3, 7.0, 10.0}) {
            const double l[1] = {L};
            CHECK(psi_hat_beta2(n, n - 1, l).value == doctest::Approx(bessel_psi(n - 1, L)).epsilon(1e-12));
            CHECK(psi_hat_beta4(n, n - 1, l).value == doctest::Approx(bessel_psi(2 * n - 1, L)).epsilon(1e-12));
        }
}

TEST_CASE("beta = 2 Gram and determinant forms agree") {
    const double l[3] = {0.4, 1.3, 2.1};
    for (int m = 0; m <= 2; ++m)
        CHECK(psi_hat_beta2_gram(3 + m, m, l) == doctest::Approx(psi_hat_beta2(3 + m, m, l).value).epsilon(1e-10));
}

TEST_CASE("two column quaternion kernel") {
    for (int m = 0; m <= 2; ++m) {
        CHECK(psi_tilde4_pair(m, 1e-4, 2e-4) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(psi_tilde4_pair(m, 0.7, 1.9) == doctest::Approx(psi_tilde4_pair(m, 1.9, 0.7)).epsilon(1e-12));
        // series and closed form meet across the switch radius
        CHECK(psi_tilde4_pair(m, 2.9, 3.1) == doctest::Approx(psi_tilde4_pair(m, 2.9, 3.1001)).epsilon(1e-3));
    }
    CHECK(psi_tilde4_bracket_constant(0) > 0);
}

TEST_CASE("pinned beta = 4 constant does not depend on the ray") {
    for (int k = 2; k <= 4; ++k)
        for (int m = 0; m <= 1; ++m) {
            std::vector<Rational> a, b;
            for (int i = 1; i <= k; ++i) {
                a.push_back(Rational(i));
                b.push_back(frac(i * i + 2, 3));
            }
            CHECK(beta4_pinned_constant_at(k, m, a) == beta4_pinned_constant_at(k, m, b));
        }
    CHECK(beta4_pinned_constant(1, 2) == 1);
    CHECK(beta4_pinned_constant(2, 0) == 1);
}

TEST_CASE("kernels are one at the origin and reject bad input") {
    const double l2[2] = {1e-5, 2e-5};
    CHECK(psi_hat_beta2(4, 2, l2).value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(psi_hat_beta4(4, 2, l2).value == doctest::Approx(1.0).epsilon(1e-8));
    const double degenerate[2] = {1.0, 1.0};
    CHECK_THROWS(psi_hat_beta2(4, 2, degenerate));
    CHECK_THROWS(psi_hat_beta4(4, 2, degenerate));
    const double wrong[1] = {1.0};
    CHECK_THROWS(psi_hat_beta2(4, 2, wrong));
}

TEST_CASE("kernel moments match exact Haar moments") {
    {
        const double l[2] = {0.3, 0.6};
        const MomentCheck mc = kernel_moment_check(StiefelSpec(2, 3, 2), l, 8);
        CHECK(mc.passed);
        for (const auto& r : mc.rows) CHECK(r.kernel_term == doctest::Approx(r.series_term).epsilon(1e-9).scale(1e-12));
    }
    {
        const double l[2] = {0.5, 0.2};
        const MomentCheck mc = kernel_moment_check(StiefelSpec(4, 3, 2), l, 8);
        CHECK(mc.passed);
        for (const auto& r : mc.rows) CHECK(r.kernel_term == doctest::Approx(r.series_term).epsilon(1e-9).scale(1e-12));
    }
}
