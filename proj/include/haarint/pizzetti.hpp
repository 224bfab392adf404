#pragma once

#include "haarint/algebra.hpp"
#include "haarint/clifford.hpp"
#include "haarint/diffop.hpp"
#include "haarint/stiefel.hpp"

#include <optional>
#include <string>

namespace haarint {

enum class Engine { Auto, Sphere, Codim2, So2, Clifford, Recursion };

Engine parse_engine(const std::string& s);
std::string engine_name(Engine e);

// Exact moment engines. Results are Gaussian rationals so that complex
// coefficients pass through; real input gives a real result.
GaussRational sphere_integrate(int N, const Polynomial& f);
GaussRational codim2_integrate(const StiefelSpec& spec, const Polynomial& f);
GaussRational so2_integrate(const Polynomial& f);
GaussRational clifford_functional(int kappa, int m, const JSet& js, const Polynomial& f);
// Column kcur is 1-based. Returns a polynomial in columns 1..kcur-1.
Polynomial t_operator(const StiefelSpec& spec, int kcur, const Polynomial& f);
GaussRational recursion_integrate(const StiefelSpec& spec, const Polynomial& f);

// Engine that `Auto` resolves to for a spec, and whether `e` supports it.
Engine resolve_engine(Engine e, const StiefelSpec& spec);
bool engine_supports(Engine e, const StiefelSpec& spec);
GaussRational integrate(Engine e, const StiefelSpec& spec, const Polynomial& f);

// 1 / (4^j j! (nu+1)_j)
Rational sphere_coefficient(const Rational& nu_plus_one, int j);
// 1 / (4^j (a)_j (b)_l (j-2l)! l!)
Rational codim2_coefficient(const Rational& a, const Rational& b, int j, int l);

// E(u_i^2 f) = E(f), E(<u_i, J^(l) u_j> f) = delta_ij delta_l0 E(f).
CheckReport check_pairing_invariance(const StiefelSpec& spec, Engine e, int trials, std::uint64_t seed, int max_degree = 4);
// E(f o P) = E(f) for random signed-permutation elements P of U^(beta)(n),
// and E(f) = 0 for odd-degree f.
CheckReport check_left_invariance(const StiefelSpec& spec, Engine e, int trials, std::uint64_t seed);
// [B^l, u^2] = B_u^(l) B^(l-1) and [A^p, B_u^(l)] = 8 p l A^(p-1) B for l, p <= lmax.
CheckReport check_clifford_lemmas(int kappa, int m, int trials, std::uint64_t seed, int lmax = 3);

// Signed permutation of the real coordinates induced by left multiplication
// with a random monomial element of U^(beta)(n).
void random_monomial_group_element(const StiefelSpec& spec, std::mt19937_64& rng, std::vector<int>& perm,
                                   std::vector<int>& sign);

}  // namespace haarint
