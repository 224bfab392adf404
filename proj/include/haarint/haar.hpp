#pragma once

#include "haarint/algebra.hpp"
#include "haarint/batch_eval.hpp"
#include "haarint/stiefel.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace haarint {

using CMatrix = std::vector<std::vector<std::complex<double>>>;

// First k columns of a Haar element of U^(beta)(n), in CoordLayout order.
// `raw` keeps the complex matrix the sampler orthonormalized.
struct HaarSample {
    StiefelSpec spec;
    std::vector<double> x;
    CMatrix raw;
};

HaarSample sample_stiefel(const StiefelSpec& spec, std::mt19937_64& rng);

// Complex matrix of a sample: n x k for beta = 1, 2 and the 2n x 2k block
// form [[z, w], [-conj(w), conj(z)]] of q = z + w j for beta = 4. Uses `raw`
// when present.
CMatrix complex_form(const HaarSample& s);
// max |A^dagger A - 1| over the complex form.
double orthonormality_residual(const HaarSample& s);
// beta = 4: max |A - tau A^* tau^T| with tau = 1_n (x) [[0, 1], [-1, 0]]; zero otherwise.
double structure_residual(const HaarSample& s);

struct McEstimate {
    double mean = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Samples are drawn in blocks of this size, each from its own stream seeded
// with (seed, block index), so results do not depend on the thread count.
inline constexpr std::size_t kBlockSize = 4096;

// 0 means HAARINT_THREADS, falling back to the hardware concurrency.
int resolve_threads(int requested);

McEstimate mc_integrate(const StiefelSpec& spec, const Polynomial& f, std::uint64_t samples, std::uint64_t seed,
                        int threads = 0);
// One pass over the samples for several polynomials.
std::vector<McEstimate> mc_integrate_many(const StiefelSpec& spec, const std::vector<Polynomial>& fs,
                                          std::uint64_t samples, std::uint64_t seed, int threads = 0,
                                          SimdPath path = best_simd_path());
McEstimate mc_integrate(const StiefelSpec& spec, const std::function<double(std::span<const double>)>& f,
                        std::uint64_t samples, std::uint64_t seed, int threads = 0);

// E over the unit sphere in R^N of prod x_i^alpha_i.
Rational sphere_monomial_moment(int N, std::span<const int> exponents);

// Gauss-Legendre product rule for (1,2,2) (SO(2), one angle), (1,3,k)
// (SO(3) Euler angles) and (2,1,1) (U(1)).
double low_dim_quadrature(const StiefelSpec& spec, const Polynomial& f, int nodes = 64);

// Nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace haarint
