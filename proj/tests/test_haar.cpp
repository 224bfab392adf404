#include <doctest.h>

#include "haarint/haar.hpp"
#include "haarint/pizzetti.hpp"

#include <cmath>

using namespace haarint;

TEST_CASE("samples are orthonormal with quaternionic structure") {
    std::mt19937_64 rng(3);
    for (int beta : {1, 2, 4})
        for (int n = 2; n <= 5; ++n)
            for (int k = 1; k <= n; ++k) {
                const StiefelSpec spec(beta, n, k);
                for (int t = 0; t < 20; ++t) {
                    const HaarSample s = sample_stiefel(spec, rng);
                    CHECK(s.x.size() == std::size_t(spec.layout.dim()));
                    CHECK(orthonormality_residual(s) < 1e-12);
                    CHECK(structure_residual(s) < 1e-12);
                }
            }
}

TEST_CASE("structure residual sees a broken quaternion block") {
    std::mt19937_64 rng(4);
    HaarSample s = sample_stiefel(StiefelSpec(4, 3, 2), rng);
    s.raw[0][1] += 0.25;
    CHECK(structure_residual(s) > 0.1);
}

TEST_CASE("Monte Carlo is exact on constants and reproducible across threads") {
    const StiefelSpec spec(2, 4, 2);
    const Polynomial one = Polynomial::constant(spec.layout, 1);
    const McEstimate c = mc_integrate(spec, one, 5000, 9, 1);
    CHECK(c.mean == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.std_error < 1e-12);

    // |u_1|^2 = 1 on every sample
    Polynomial norm(spec.layout);
    for (int l = 0; l < 2; ++l)
        for (int r = 0; r < 4; ++r) norm += Polynomial::variable(spec.layout, spec.layout.index(0, l, r)).pow(2);
    CHECK(mc_integrate(spec, norm, 3000, 1, 1).mean == doctest::Approx(1.0).epsilon(1e-13));

    std::mt19937_64 rng(5);
    const Polynomial f = random_polynomial(spec.layout, 4, rng);
    const McEstimate a = mc_integrate(spec, f, 20000, 77, 1);
    const McEstimate b = mc_integrate(spec, f, 20000, 77, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK_THROWS(mc_integrate(spec, f, 10, 1, 1));
}

TEST_CASE("Monte Carlo agrees with the exact engine") {
    std::mt19937_64 rng(6);
    for (int beta : {1, 2, 4}) {
        const StiefelSpec spec(beta, 3, 2);
        const Polynomial f = random_polynomial(spec.layout, 4, rng);
        const McEstimate e = mc_integrate(spec, f, 100000, 21);
        const double exact = to_double(integrate(Engine::Auto, spec, f).re);
        CHECK(std::fabs(e.mean - exact) <= 5 * e.std_error + 1e-14);
    }
}

TEST_CASE("sphere moments") {
    const int a[3] = {2, 4, 0};
    // 1 * 3 / (5 * 7 * 9)
    CHECK(sphere_monomial_moment(5, a) == frac(3, 315));
    const int odd[2] = {1, 1};
    CHECK(sphere_monomial_moment(4, odd) == 0);
    const int b[1] = {2};
    CHECK(sphere_monomial_moment(7, b) == frac(1, 7));
}

TEST_CASE("Gauss-Legendre") {
    std::vector<double> x, w;
    gauss_legendre(12, x, w);
    double s0 = 0, s10 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s0 += w[i];
        s10 += w[i] * std::pow(x[i], 10);
    }
    CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s10 == doctest::Approx(2.0 / 11).epsilon(1e-13));
}

TEST_CASE("low dimensional quadrature matches exact integrals") {
    std::mt19937_64 rng(8);
    for (const StiefelSpec& spec : {StiefelSpec(1, 2, 2), StiefelSpec(2, 1, 1), StiefelSpec(1, 3, 1), StiefelSpec(1, 3, 2)}) {
        const Polynomial f = random_polynomial(spec.layout, 6, rng);
        CHECK(low_dim_quadrature(spec, f) ==
              doctest::Approx(to_double(integrate(Engine::Auto, spec, f).re)).epsilon(1e-10).scale(1e-10));
    }
    CHECK_THROWS(low_dim_quadrature(StiefelSpec(2, 3, 1), Polynomial(StiefelSpec(2, 3, 1).layout)));
}
