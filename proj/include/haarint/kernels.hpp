#pragma once

#include "haarint/algebra.hpp"
#include "haarint/pizzetti.hpp"
#include "haarint/stiefel.hpp"

#include <span>
#include <string>
#include <vector>

namespace haarint {

enum class KernelMethod { Bessel, DetBeta2, PfaffianBeta4Even, PfaffianBeta4Odd, MomentSeries };
std::string method_name(KernelMethod m);

struct KernelValue {
    double value = 0.0;
    KernelMethod method = KernelMethod::Bessel;
    int truncation = 0;  // moment_series only
};

// Minimum relative gap between two singular values.
inline constexpr double kGapTolerance = 1e-6;

using DMatrix = std::vector<std::vector<double>>;

// Gamma(nu+1) J_nu(x) / (x/2)^nu for nu >= -1/2; equals 1 at x = 0.
double bessel_psi(double nu, double x);
// J_nu(x) / (x/2)^nu for integer nu >= -1 (no Gamma prefactor, so nu = -1 is fine).
double bessel_phi(int nu, double x);

KernelValue psi_hat_beta2(int n, int m, std::span<const double> lambdas);
// The Gram form det[tr L^{2(a+b-2)} Psi_{m+b-1}(L)] / det[tr L^{2(a+b-2)}].
double psi_hat_beta2_gram(int n, int m, std::span<const double> lambdas);

// The two-column quaternion kernel, normalized to 1 at the origin.
double psi_tilde4_pair(int m, double la, double lb);
// Constant term of the unnormalized bracket (e.g. 1/96 for m = 0).
Rational psi_tilde4_bracket_constant(int m);

KernelValue psi_hat_beta4(int n, int m, std::span<const double> lambdas);
// Overall constant C in C * Pf[...] / Delta(Lambda^2), fixed by the value 1 at
// the origin and computed exactly along the ray t * nodes.
Rational beta4_pinned_constant(int k, int m);
Rational beta4_pinned_constant_at(int k, int m, const std::vector<Rational>& nodes_squared);
// Closed-form Gamma-function product for the same constant, rescaled to the
// C * Pf[...] / Delta(Lambda^2) form. Differs from the pinned value; kept for comparison.
double beta4_gamma_chain_constant(int k, int m);

double pfaffian(DMatrix a);
double determinant(DMatrix a);

// Taylor coefficients kappa_d of t -> Psi_hat(t * Lambda) at t^(2d), d = 0..order.
std::vector<double> kernel_ray_series(int beta, int n, int m, std::span<const double> lambdas, int order);

struct MomentCheckRow {
    int degree = 0;           // 2d
    double series_term = 0;   // (-1)^d / (2d)! * E[l^(2d)]
    double kernel_term = 0;   // kappa_d
};

struct MomentCheck {
    double series_value = 0;
    double kernel_value = 0;
    double tail_bound = 0;
    bool passed = false;
    std::vector<MomentCheckRow> rows;
};

// B = diag(Lambda) embedded in the real component; l(A) = sum_c Lambda_c Re A_cc.
// Exact moments of l come from the exact engine `e`.
MomentCheck kernel_moment_check(const StiefelSpec& spec, std::span<const double> lambdas, int D,
                                Engine e = Engine::Recursion);

}  // namespace haarint
