#include <doctest.h>

#include "haarint/iz.hpp"
#include "haarint/pizzetti.hpp"

#include <cmath>

using namespace haarint;

namespace {

const CoordLayout L = sym4_layout();

Polynomial E(int a) { return Polynomial::variable(L, a); }

// h_q by direct enumeration of degree-q monomials.
Polynomial complete_homogeneous(int q) {
    Polynomial h(L);
    for (int a = 0; a <= q; ++a)
        for (int b = 0; a + b <= q; ++b)
            for (int c = 0; a + b + c <= q; ++c)
                h.add_term(Monomial({{0, a}, {1, b}, {2, c}, {3, q - a - b - c}}), GaussRational(1));
    return h;
}

Polynomial e4() { return E(0) * E(1) * E(2) * E(3); }

// Taylor series of E[exp(-2 sum_a E_a (u_a^2 + v_a^2))] through degree D, with
// each moment taken from the exact Stiefel engine.
double taylor_oracle(const std::array<double, 4>& H, int D) {
    const StiefelSpec spec(1, 4, 2);
    Polynomial s(spec.layout);
    for (int a = 0; a < 4; ++a) {
        const Polynomial u = Polynomial::variable(spec.layout, spec.layout.index(0, 0, a));
        const Polynomial v = Polynomial::variable(spec.layout, spec.layout.index(1, 0, a));
        s += (u * u + v * v) * GaussRational(Rational(H[a]));
    }
    double total = 0, fact = 1;
    Polynomial p = Polynomial::constant(spec.layout, 1);
    for (int d = 0; d <= D; ++d) {
        if (d > 0) {
            p = p * s;
            fact *= d;
        }
        total += std::pow(-2.0, d) / fact * to_double(integrate(Engine::Auto, spec, p).re);
    }
    return total;
}

}  // namespace

TEST_CASE("schur term is det H times a complete homogeneous polynomial") {
    for (int q = 0; q <= 5; ++q) CHECK(schur_term(q + 2, 1) == e4() * complete_homogeneous(q));
    CHECK_THROWS(schur_term(1, 1));
}

TEST_CASE("D3 on det H") {
    Polynomial e2(L);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) e2 += E(a) * E(b);
    CHECK(apply_d3(e4()) == e4() * e2 * GaussRational(frac(1, 2)));
    CHECK(is_symmetric4(apply_d3(e4() * e2)));
    CHECK_FALSE(is_symmetric4(E(0)));
    CHECK_THROWS_AS(apply_d3(E(0) * E(0)), std::invalid_argument);
}

TEST_CASE("series coefficients") {
    CHECK(iz_coefficient(0, 0, IzCoefficient::Plain) == 1);
    CHECK(iz_coefficient(1, 0, IzCoefficient::Plain) == -1);
    CHECK(iz_coefficient(2, 1, IzCoefficient::Plain) == frac(16, 36));
    CHECK(iz_coefficient(2, 1, IzCoefficient::ExtraFactorial) == frac(16 * 24, 36));
    CHECK(parse_convention("paper") == SumConvention::FromOne);
    CHECK(convention_name(SumConvention::FromZero) == "from_zero");
    CHECK_THROWS(parse_convention("p=2"));
}

TEST_CASE("series at scalar H") {
    const IzResult r0 = iz_series({0, 0, 0, 0});
    CHECK(r0.value == 1.0);
    CHECK(r0.converged);
    for (double c : {0.1, 0.5, 1.0}) {
        const IzResult r = iz_series({c, c, c, c});
        CHECK(r.converged);
        CHECK(r.value == doctest::Approx(std::exp(-4 * c)).epsilon(1e-10));
    }
}

TEST_CASE("series matches the Taylor expansion of the Haar average") {
    const std::array<double, 4> H{0.012, -0.007, 0.004, 0.01};
    CHECK(iz_series(H).value - 1 == doctest::Approx(taylor_oracle(H, 6) - 1).epsilon(1e-9));
}

TEST_CASE("truncation is flagged") {
    const IzResult r = iz_series({0.4, -0.3, 0.2, 0.1}, 3);
    CHECK_FALSE(r.converged);
    CHECK(r.truncated);
    CHECK(r.jmax == 3);
    CHECK_THROWS(iz_series({0, 0, 0, 0}, 61));
    CHECK_THROWS(iz_series({NAN, 0, 0, 0}));
}

TEST_CASE("Sekiguchi operator identities") {
    const SekiguchiReport r = sekiguchi_check(4);
    CHECK(r.passed);
    CHECK(r.failure.empty());
    REQUIRE(r.d1_coefficients.size() == 4);
    CHECK(r.d1_coefficients[0] == frac(15, 2));
    CHECK(r.d1_coefficients[1] == frac(105, 2));
    CHECK(r.d1_coefficients[2] == 189);
    CHECK(r.d1_coefficients[3] == frac(495, 1));
}
