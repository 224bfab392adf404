#include <doctest.h>

#include "haarint/pizzetti.hpp"

using namespace haarint;

namespace {

Polynomial var(const CoordLayout& l, int i) { return Polynomial::variable(l, i); }
GaussRational q(long p, long d = 1) { return GaussRational(frac(p, d)); }

// Independent sphere moment: prod (a_i - 1)!! / (N (N+2) ... (N + |a| - 2)).
Rational double_factorial_moment(int N, const std::vector<int>& a) {
    int total = 0;
    Rational num(1);
    for (int e : a) {
        if (e % 2) return Rational(0);
        for (int t = e - 1; t > 0; t -= 2) num *= t;
        total += e;
    }
    Rational den(1);
    for (int t = 0; t < total; t += 2) den *= N + t;
    return num / den;
}

}  // namespace

TEST_CASE("sphere functional on small monomials") {
    for (int N = 2; N <= 6; ++N) {
        CoordLayout l(1, N, 1);
        CHECK(sphere_integrate(N, Polynomial::constant(l, 1)) == q(1));
        CHECK(sphere_integrate(N, var(l, 0) * var(l, 0)) == q(1, N));
        CHECK(sphere_integrate(N, var(l, 0).pow(4)) == q(3, N * (N + 2)));
        CHECK(sphere_integrate(N, var(l, 0) * var(l, 1)).is_zero());
        std::vector<int> a(N, 0);
        a[0] = 2;
        a[1] = 4;
        CHECK(sphere_integrate(N, var(l, 0).pow(2) * var(l, 1).pow(4)) == GaussRational(double_factorial_moment(N, a)));
    }
    CHECK_THROWS(sphere_integrate(1, Polynomial::constant(CoordLayout(1, 1, 1), 1)));
}

TEST_CASE("codimension-two functional") {
    for (int beta : {1, 2, 4})
        for (int n = 2; n <= 4; ++n) {
            StiefelSpec s(beta, n, 2);
            auto id = SignedPerm::identity(beta * n);
            Polynomial uu = column_inner(s.layout, 0, 0, id);
            Polynomial uv = column_inner(s.layout, 0, 1, id);
            CHECK(codim2_integrate(s, Polynomial::constant(s.layout, 1)) == q(1));
            CHECK(codim2_integrate(s, uu) == q(1));
            CHECK(codim2_integrate(s, uv * uv).is_zero());
        }
    for (int n = 2; n <= 5; ++n) {
        StiefelSpec s(1, n, 2);
        Polynomial u1 = var(s.layout, 0), v1 = var(s.layout, n);
        CHECK(codim2_integrate(s, u1 * u1 * v1 * v1) == q(1, n * (n + 2)));
        CHECK(codim2_integrate(s, u1 * u1) == q(1, n));
    }
    CHECK_THROWS(codim2_integrate(StiefelSpec(1, 3, 1), Polynomial::constant(CoordLayout(1, 3, 1), 1)));
}

TEST_CASE("rotation group in the plane") {
    StiefelSpec s(1, 2, 2);
    const auto& l = s.layout;
    CHECK(so2_integrate(Polynomial::constant(l, 1)) == q(1));
    CHECK(so2_integrate(var(l, 0) * var(l, 3)) == q(1, 2));
    CHECK(so2_integrate(var(l, 0) * var(l, 2)).is_zero());
    // O(2) would give zero for the determinant
    CHECK(codim2_integrate(s, var(l, 0) * var(l, 3) - var(l, 1) * var(l, 2)).is_zero());
    CHECK(so2_integrate(var(l, 0) * var(l, 3) - var(l, 1) * var(l, 2)) == q(1));
}

TEST_CASE("clifford functional agrees with the codimension-two engine") {
    std::mt19937_64 rng(21);
    for (int kappa : {1, 2, 4})
        for (int m = 2; m <= 3; ++m) {
            StiefelSpec s(kappa, m, 2);
            JSet js = build_general_jset(kappa, kappa * m);
            CHECK(clifford_functional(kappa, m, js, Polynomial::constant(s.layout, 1)) == q(1));
            for (int t = 0; t < 4; ++t) {
                Polynomial f = random_polynomial(s.layout, 6, rng);
                CHECK(clifford_functional(kappa, m, js, f) == codim2_integrate(s, f));
            }
        }
    // kappa = 3 has no division-algebra counterpart; check the u^2 invariance
    CoordLayout l = CoordLayout::generic(3, 4, 2);
    JSet js = build_general_jset(3, 12);
    Polynomial uu = column_inner(l, 0, 0, js.mats[0]);
    for (int t = 0; t < 4; ++t) {
        Polynomial f = random_polynomial(l, 4, rng);
        CHECK(clifford_functional(3, 4, js, uu * f) == clifford_functional(3, 4, js, f));
    }
}

TEST_CASE("single-column transform") {
    StiefelSpec s(2, 3, 2);
    const auto& l = s.layout;
    Polynomial f = var(l, 0) * var(l, 1) + var(l, 2);
    CHECK(t_operator(s, 2, f) == f);
    Polynomial v2 = column_inner(l, 1, 1, SignedPerm::identity(6));
    // Delta v^2 = 2d, and the projection part removes 2 beta |u|^2; equals 1 on |u| = 1.
    Polynomial u2 = column_inner(l, 0, 0, SignedPerm::identity(6));
    CHECK(t_operator(s, 2, v2) == Polynomial::constant(l, q(3, 2)) - u2 * q(1, 2));
    std::mt19937_64 rng(4);
    StiefelSpec s1(4, 2, 1);
    for (int t = 0; t < 5; ++t) {
        Polynomial g = random_polynomial(s1.layout, 6, rng);
        CHECK(t_operator(s1, 1, g).constant_term() == sphere_integrate(8, g));
    }
    CHECK_THROWS(t_operator(s, 3, f));
}

TEST_CASE("recursion chain") {
    StiefelSpec s(1, 4, 3);
    CHECK(recursion_integrate(s, var(s.layout, 0) * var(s.layout, 0)) == q(1, 4));
    CHECK_THROWS(recursion_integrate(StiefelSpec(1, 3, 3), Polynomial::constant(CoordLayout(1, 3, 3), 1)));
    std::mt19937_64 rng(12);
    for (int beta : {1, 2, 4})
        for (int n = 2; n <= 3; ++n) {
            StiefelSpec s2(beta, n, 2);
            StiefelSpec s1(beta, n, 1);
            for (int t = 0; t < 4; ++t) {
                Polynomial f = random_polynomial(s2.layout, 6, rng);
                CHECK(recursion_integrate(s2, f) == codim2_integrate(s2, f));
                Polynomial g = random_polynomial(s1.layout, 6, rng);
                CHECK(recursion_integrate(s1, g) == sphere_integrate(beta * n, g));
            }
        }
}

TEST_CASE("full unitary groups: columns are orthonormal") {
    for (int beta : {2, 4}) {
        StiefelSpec s(beta, 2, 2);
        auto id = SignedPerm::identity(2 * beta);
        Polynomial uv = column_inner(s.layout, 0, 1, id);
        CHECK(recursion_integrate(s, uv * uv).is_zero());
        CHECK(recursion_integrate(s, column_inner(s.layout, 1, 1, id)) == q(1));
    }
    StiefelSpec so(1, 2, 2);
    Polynomial det = var(so.layout, 0) * var(so.layout, 3) - var(so.layout, 1) * var(so.layout, 2);
    CHECK(recursion_integrate(so, det * det) == q(1));
    CHECK(recursion_integrate(so, det).is_zero());
}

TEST_CASE("invariance suites") {
    for (auto [beta, n, k] : {std::tuple{1, 3, 2}, std::tuple{2, 2, 1}, std::tuple{4, 2, 2}, std::tuple{2, 3, 3}}) {
        StiefelSpec s(beta, n, k);
        auto r1 = check_pairing_invariance(s, Engine::Auto, 3, 1);
        CHECK_MESSAGE(r1.passed, r1.failed);
        auto r2 = check_left_invariance(s, Engine::Recursion, 3, 2);
        CHECK_MESSAGE(r2.passed, r2.failed);
    }
    auto r3 = check_pairing_invariance(StiefelSpec(1, 2, 2), Engine::So2, 3, 5);
    CHECK_MESSAGE(r3.passed, r3.failed);
}

TEST_CASE("clifford lemmas") {
    for (auto [kappa, m] : {std::pair{1, 3}, std::pair{2, 2}, std::pair{3, 4}}) {
        auto rep = check_clifford_lemmas(kappa, m, 3, 17, 2);
        CHECK_MESSAGE(rep.passed, rep.failed);
    }
}

TEST_CASE("engine routing") {
    CHECK(resolve_engine(Engine::Auto, StiefelSpec(2, 3, 1)) == Engine::Sphere);
    CHECK(resolve_engine(Engine::Auto, StiefelSpec(1, 2, 2)) == Engine::So2);
    CHECK(resolve_engine(Engine::Auto, StiefelSpec(4, 3, 2)) == Engine::Codim2);
    CHECK(resolve_engine(Engine::Auto, StiefelSpec(2, 4, 3)) == Engine::Recursion);
    CHECK_FALSE(engine_supports(Engine::Sphere, StiefelSpec(2, 3, 2)));
    CHECK(parse_engine("clifford") == Engine::Clifford);
    CHECK_THROWS(parse_engine("magic"));
}
