#include <doctest.h>

#include "haarint/batch_eval.hpp"

#include <cstring>
#include <random>

using namespace haarint;

TEST_CASE("batched evaluation matches direct evaluation") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    const CoordLayout l(2, 3, 2);
    const std::size_t n = 37;
    std::vector<double> soa(l.dim() * n);
    for (double& v : soa) v = g(rng);
    for (int t = 0; t < 10; ++t) {
        const Polynomial f = random_polynomial(l, 6, rng);
        const CompiledPoly c = compile(f);
        std::vector<double> out(n);
        eval_batch(c, soa.data(), n, n, out.data(), SimdPath::Scalar);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> pt(l.dim());
            for (int v = 0; v < l.dim(); ++v) pt[v] = soa[v * n + i];
            CHECK(out[i] == doctest::Approx(f.eval(pt).real()).epsilon(1e-12).scale(1e-12));
        }
    }
}

TEST_CASE("vector path is bitwise identical to the scalar path") {
    if (best_simd_path() != SimdPath::Avx2) {
        MESSAGE("AVX2 not available; only the scalar path is exercised");
        return;
    }
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    const CoordLayout l(4, 3, 2);
    for (std::size_t n : {1u, 4u, 7u, 64u, 1001u}) {
        std::vector<double> soa(l.dim() * n);
        for (double& v : soa) v = 3 * g(rng);
        for (int t = 0; t < 8; ++t) {
            const CompiledPoly c = compile(random_polynomial(l, 8, rng));
            std::vector<double> a(n), b(n);
            eval_batch(c, soa.data(), n, n, a.data(), SimdPath::Scalar);
            eval_batch(c, soa.data(), n, n, b.data(), SimdPath::Avx2);
            CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("simd path names") {
    CHECK(simd_path_name(SimdPath::Scalar) == "scalar");
    CHECK(simd_path_name(SimdPath::Avx2) == "avx2");
}
