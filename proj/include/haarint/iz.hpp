#pragma once

#include "haarint/algebra.hpp"
#include "haarint/haar.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace haarint {

// Polynomials in E_1..E_4 live on CoordLayout::generic(1, 4, 1).
CoordLayout sym4_layout();

// det[{E_b^a}_{a=1..3}; {E_b^(j-2p+4)}] / Delta_4(E), expanded and divided exactly.
Polynomial schur_term(int j, int p);
// D_3 = sum_{a<b} [E_a^2 E_b^2 d_a d_b - 1/2 E_a E_b (E_a^2 d_a - E_b^2 d_b) / (E_a - E_b)].
// Throws std::invalid_argument on non-symmetric input.
Polynomial apply_d3(const Polynomial& f);
bool is_symmetric4(const Polynomial& f);

// Lower limit of the inner sum over p. CLI names: "paper" (p >= 1) and "from_zero".
enum class SumConvention { FromOne, FromZero };
// `ExtraFactorial` multiplies every coefficient by (j+2p)!; `Plain` does not.
enum class IzCoefficient { Plain, ExtraFactorial };
SumConvention parse_convention(const std::string& s);
std::string convention_name(SumConvention c);

struct IzResult {
    double value = 0;
    int jmax = 0;             // last shell included
    double tail_estimate = 0; // |last shell|
    bool converged = false;
    bool truncated = false;
};

// I(H) = E over St^(1)(4,2) of exp(-2 tr X X^T H), H = diag(E).
IzResult iz_series(const std::array<double, 4>& E, int jmax = 60, SumConvention conv = SumConvention::FromZero,
                   IzCoefficient coef = IzCoefficient::Plain);
// Coefficient of [D_3^p schur_term(j, p)] / det H in shell j.
Rational iz_coefficient(int j, int p, IzCoefficient coef);

McEstimate iz_monte_carlo(const std::array<double, 4>& E, std::uint64_t samples, std::uint64_t seed, int threads = 0);

struct SekiguchiReport {
    bool passed = true;
    int checks = 0;
    std::string failure;                 // first failing identity
    std::vector<Rational> d1_coefficients; // D1 det^a k = c_a det^(a-1) k, a = 1..a_max
};

// Verifies on det^a k, a = 1..a_max: the D1 action, D4 = sum d_a, D2 = [D1, tr k],
// the closed form of D3 and the unit leading coefficient of D(lambda).
SekiguchiReport sekiguchi_check(int a_max);

}  // namespace haarint
