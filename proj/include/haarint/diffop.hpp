#pragma once

#include "haarint/algebra.hpp"
#include "haarint/clifford.hpp"
#include "haarint/stiefel.hpp"

#include <functional>
#include <string>
#include <vector>

namespace haarint {

// Constant-coefficient operator: a polynomial in the partials d_0..d_{dim-1}.
struct DiffOp {
    Polynomial symbol;

    DiffOp() = default;
    explicit DiffOp(Polynomial p) : symbol(std::move(p)) {}
    static DiffOp identity(const CoordLayout& l) { return DiffOp(Polynomial::constant(l, GaussRational(1))); }
    static DiffOp partial(const CoordLayout& l, int idx) { return DiffOp(Polynomial::variable(l, idx)); }

    const CoordLayout& layout() const { return symbol.layout(); }
    DiffOp& operator+=(const DiffOp& o) { symbol += o.symbol; return *this; }
    DiffOp& operator-=(const DiffOp& o) { symbol -= o.symbol; return *this; }
    friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
    friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
    friend DiffOp operator*(const DiffOp& a, const DiffOp& b) { return DiffOp(a.symbol * b.symbol); }
    friend DiffOp operator*(DiffOp a, const GaussRational& c) { a.symbol *= c; return a; }
    DiffOp pow(int e) const { return DiffOp(symbol.pow(e)); }
    friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.symbol == b.symbol; }
};

Polynomial op_apply(const DiffOp& op, const Polynomial& f);

DiffOp column_laplacian(const CoordLayout& layout, int c);
// sum_{a,b} J_ab d_(i,a) d_(j,b) over the stacked column coordinates
DiffOp pair_op(const CoordLayout& layout, int i, int j, const SignedPerm& J);

struct InvariantOps {
    DiffOp I1;
    DiffOp I2;
};

// I1 = Lap_u + Lap_v, I2 = Lap_u Lap_v - sum_l <grad_u, J^(l) grad_v>^2 for columns 0, 1.
InvariantOps invariant_ops(const CoordLayout& layout, const JSet& js);
InvariantOps invariant_ops(const StiefelSpec& spec);

struct GradientInvariants {
    int gamma = 1;
    std::vector<DiffOp> traces;       // tr((G^dagger G)^p), p = 1..p_max
    std::vector<DiffOp> power_sums;   // traces / gamma
    std::vector<DiffOp> elementary;   // I_1..I_pmax from Newton's identities on power_sums
};

// G is the complex gradient: d_x + i d_y per complex entry (beta = 2), or the
// 2x2 block [[d_a + i d_b, d_c + i d_d], [-d_c + i d_d, d_a - i d_b]] per
// quaternion entry (beta = 4). Acting on exp(i <B, A>) it returns i B.
GradientInvariants gradient_matrix_invariants(const StiefelSpec& spec, int p_max);

// Variable-coefficient operators of the commutator relations, acting on
// polynomials directly. Columns are indices into the layout.
using PolyOp = std::function<Polynomial(const Polynomial&)>;

PolyOp as_polyop(DiffOp op);
PolyOp multiply_by(Polynomial g);
PolyOp euler_op(const CoordLayout& layout, int c);
// <u_i, J grad_{u_j}> = sum_{a,b} (u_i)_a J_ab d_(j,b)
PolyOp vec_grad_op(const CoordLayout& layout, int i, int j, const SignedPerm& J);
Polynomial column_inner(const CoordLayout& layout, int i, int j, const SignedPerm& J);
PolyOp compose(PolyOp a, PolyOp b);  // a after b
PolyOp commutator(PolyOp a, PolyOp b);

struct CheckReport {
    bool passed = true;
    int relations = 0;
    int applications = 0;
    std::string failed;
    std::string witness;  // JSON of the failing polynomial
};

// Applies both sides of the eight first-order commutator relations for the
// vector pair (column 0, column 1) to random polynomials of degree <= 5.
CheckReport check_commutators(const CoordLayout& layout, int trials, std::uint64_t seed);

}  // namespace haarint
