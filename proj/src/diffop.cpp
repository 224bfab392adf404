#include "haarint/diffop.hpp"

#include <stdexcept>

namespace haarint {

namespace {

// b!/(b-a)! accumulated over the coordinates of a monomial pair.
void falling_multiplier(mpz_class& acc, std::uint32_t b, std::uint32_t a) {
    for (std::uint32_t t = 0; t < a; ++t) acc *= (b - t);
}

}  // namespace

Polynomial op_apply(const DiffOp& op, const Polynomial& f) {
    if (!(op.layout() == f.layout())) throw std::invalid_argument("layout mismatch");
    Polynomial r(f.layout());
    std::vector<Monomial::Entry> quot;
    mpz_class mult;
    for (const auto& [a, c] : op.symbol.terms()) {
        for (const auto& [b, d] : f.terms()) {
            if (a.degree() > b.degree()) continue;
            if (!a.divides(b)) continue;
            quot.clear();
            mult = 1;
            auto ai = a.entries().begin();
            for (const auto& [idx, e] : b.entries()) {
                std::uint32_t ae = 0;
                if (ai != a.entries().end() && ai->first == idx) {
                    ae = ai->second;
                    ++ai;
                }
                falling_multiplier(mult, e, ae);
                if (e > ae) quot.emplace_back(idx, e - ae);
            }
            GaussRational coef = c * d;
            if (mult != 1) coef *= GaussRational(Rational(mult));
            r.add_term(Monomial(quot), coef);
        }
    }
    return r;
}

DiffOp column_laplacian(const CoordLayout& layout, int c) {
    if (c < 0 || c >= layout.k()) throw std::out_of_range("column out of range");
    Polynomial p(layout);
    const int base = c * layout.column_dim();
    for (int a = 0; a < layout.column_dim(); ++a)
        p.add_term(Monomial::var(static_cast<std::uint32_t>(base + a), 2), GaussRational(1));
    return DiffOp(std::move(p));
}

DiffOp pair_op(const CoordLayout& layout, int i, int j, const SignedPerm& J) {
    if (i < 0 || j < 0 || i >= layout.k() || j >= layout.k()) throw std::out_of_range("column out of range");
    if (J.dim() != layout.column_dim()) throw std::invalid_argument("J dimension mismatch");
    Polynomial p(layout);
    const int d = layout.column_dim();
    for (int a = 0; a < d; ++a) {
        if (J.sign[a] == 0) continue;
        auto x = static_cast<std::uint32_t>(i * d + a);
        auto y = static_cast<std::uint32_t>(j * d + J.perm[a]);
        p.add_term(Monomial({{x, 1}, {y, 1}}), GaussRational(J.sign[a]));
    }
    return DiffOp(std::move(p));
}

InvariantOps invariant_ops(const CoordLayout& layout, const JSet& js) {
    if (layout.k() != 2) throw std::invalid_argument("invariant_ops needs k = 2");
    DiffOp lu = column_laplacian(layout, 0);
    DiffOp lv = column_laplacian(layout, 1);
    DiffOp i2 = lu * lv;
    for (const auto& J : js.mats) {
        DiffOp p = pair_op(layout, 0, 1, J);
        i2 -= p * p;
    }
    return {lu + lv, i2};
}

InvariantOps invariant_ops(const StiefelSpec& spec) {
    return invariant_ops(spec.layout, build_jset(spec.beta, spec.n));
}

namespace {

using OpMatrix = std::vector<std::vector<DiffOp>>;

DiffOp conj(const DiffOp& op) {
    Polynomial p(op.layout());
    for (const auto& [m, c] : op.symbol.terms()) p.add_term(m, c.conj());
    return DiffOp(std::move(p));
}

DiffOp lin(const CoordLayout& l, int x, long cx, int y, long cy_im) {
    Polynomial p(l);
    p.add_term(Monomial::var(static_cast<std::uint32_t>(x)), GaussRational(cx));
    p.add_term(Monomial::var(static_cast<std::uint32_t>(y)), GaussRational(Rational(0), Rational(cy_im)));
    return DiffOp(std::move(p));
}

OpMatrix gradient_matrix(const StiefelSpec& s) {
    const CoordLayout& l = s.layout;
    if (s.beta == 2) {
        OpMatrix g(s.n, std::vector<DiffOp>(s.k));
        for (int r = 0; r < s.n; ++r)
            for (int c = 0; c < s.k; ++c) g[r][c] = lin(l, l.index(c, 0, r), 1, l.index(c, 1, r), 1);
        return g;
    }
    OpMatrix g(2 * s.n, std::vector<DiffOp>(2 * s.k));
    for (int r = 0; r < s.n; ++r)
        for (int c = 0; c < s.k; ++c) {
            int a = l.index(c, 0, r), b = l.index(c, 1, r), cc = l.index(c, 2, r), d = l.index(c, 3, r);
            g[2 * r][2 * c] = lin(l, a, 1, b, 1);
            g[2 * r][2 * c + 1] = lin(l, cc, 1, d, 1);
            g[2 * r + 1][2 * c] = lin(l, cc, -1, d, 1);
            g[2 * r + 1][2 * c + 1] = lin(l, a, 1, b, -1);
        }
    return g;
}

OpMatrix matmul(const OpMatrix& a, const OpMatrix& b, const CoordLayout& l) {
    OpMatrix c(a.size(), std::vector<DiffOp>(b[0].size(), DiffOp(Polynomial(l))));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].symbol.is_zero()) continue;
            for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

}  // namespace

GradientInvariants gradient_matrix_invariants(const StiefelSpec& spec, int p_max) {
    if (spec.beta == 1) throw std::invalid_argument("gradient_matrix_invariants: use pair_op for beta = 1");
    if (p_max < 1) throw std::invalid_argument("p_max must be positive");
    const CoordLayout& l = spec.layout;
    OpMatrix g = gradient_matrix(spec);
    const std::size_t rows = g.size(), cols = g[0].size();
    OpMatrix m(cols, std::vector<DiffOp>(cols, DiffOp(Polynomial(l))));
    for (std::size_t a = 0; a < cols; ++a)
        for (std::size_t b = 0; b < cols; ++b)
            for (std::size_t j = 0; j < rows; ++j) m[a][b] += conj(g[j][a]) * g[j][b];

    GradientInvariants out;
    out.gamma = spec.gamma();
    OpMatrix power = m;
    for (int p = 1; p <= p_max; ++p) {
        if (p > 1) power = matmul(power, m, l);
        DiffOp tr{Polynomial(l)};
        for (std::size_t a = 0; a < cols; ++a) tr += power[a][a];
        out.traces.push_back(tr);
        out.power_sums.push_back(tr * GaussRational(frac(1, out.gamma)));
    }
    // e_r = (1/r) sum_{i=1}^r (-1)^(i-1) e_{r-i} p_i
    std::vector<DiffOp> e{DiffOp::identity(l)};
    for (int r = 1; r <= p_max; ++r) {
        DiffOp acc{Polynomial(l)};
        for (int i = 1; i <= r; ++i) {
            DiffOp t = e[r - i] * out.power_sums[i - 1];
            if (i % 2) acc += t;
            else acc -= t;
        }
        e.push_back(acc * GaussRational(frac(1, r)));
    }
    out.elementary.assign(e.begin() + 1, e.end());
    return out;
}

PolyOp as_polyop(DiffOp op) {
    return [op = std::move(op)](const Polynomial& f) { return op_apply(op, f); };
}

PolyOp multiply_by(Polynomial g) {
    return [g = std::move(g)](const Polynomial& f) { return g * f; };
}

PolyOp euler_op(const CoordLayout& layout, int c) {
    return [layout, c](const Polynomial& f) {
        Polynomial r(layout);
        for (const auto& [m, v] : f.terms()) {
            long deg = 0;
            for (const auto& [i, e] : m.entries())
                if (layout.column_of(static_cast<int>(i)) == c) deg += e;
            if (deg) r.add_term(m, v * GaussRational(deg));
        }
        return r;
    };
}

PolyOp vec_grad_op(const CoordLayout& layout, int i, int j, const SignedPerm& J) {
    if (J.dim() != layout.column_dim()) throw std::invalid_argument("J dimension mismatch");
    // Term by term: x_{i,a} d/dx_{j,J(a)} with sign J_a.
    const int d = layout.column_dim();
    std::vector<int> src(layout.dim(), -1), sign(layout.dim(), 0);
    for (int a = 0; a < d; ++a) {
        if (J.sign[a] == 0) continue;
        src[j * d + J.perm[a]] = i * d + a;
        sign[j * d + J.perm[a]] = J.sign[a];
    }
    return [layout, src, sign](const Polynomial& f) {
        Polynomial r(layout);
        std::vector<Monomial::Entry> e;
        for (const auto& [m, c] : f.terms()) {
            for (const auto& [idx, ex] : m.entries()) {
                if (src[idx] < 0) continue;
                e = m.entries();
                for (auto& [v, x] : e)
                    if (v == idx) --x;
                e.emplace_back(static_cast<std::uint32_t>(src[idx]), 1);
                r.add_term(Monomial(e), c * GaussRational(static_cast<long>(ex) * sign[idx]));
            }
        }
        return r;
    };
}

Polynomial column_inner(const CoordLayout& layout, int i, int j, const SignedPerm& J) {
    const int d = layout.column_dim();
    Polynomial p(layout);
    for (int a = 0; a < d; ++a) {
        if (J.sign[a] == 0) continue;
        p.add_term(Monomial({{static_cast<std::uint32_t>(i * d + a), 1}, {static_cast<std::uint32_t>(j * d + J.perm[a]), 1}}),
                   GaussRational(J.sign[a]));
    }
    return p;
}

PolyOp compose(PolyOp a, PolyOp b) {
    return [a = std::move(a), b = std::move(b)](const Polynomial& f) { return a(b(f)); };
}

PolyOp commutator(PolyOp a, PolyOp b) {
    return [a = std::move(a), b = std::move(b)](const Polynomial& f) { return a(b(f)) - b(a(f)); };
}

CheckReport check_commutators(const CoordLayout& layout, int trials, std::uint64_t seed) {
    if (layout.k() < 2) throw std::invalid_argument("commutator relations need two columns");
    const int d = layout.column_dim();
    const SignedPerm id = SignedPerm::identity(d);
    const CoordLayout& l = layout;

    PolyOp lap_u = as_polyop(column_laplacian(l, 0));
    PolyOp lap_v = as_polyop(column_laplacian(l, 1));
    PolyOp grad_uv = as_polyop(pair_op(l, 0, 1, id));
    PolyOp u_gv = vec_grad_op(l, 0, 1, id);
    PolyOp v_gu = vec_grad_op(l, 1, 0, id);
    PolyOp eu = euler_op(l, 0);
    PolyOp ev = euler_op(l, 1);
    Polynomial uu = column_inner(l, 0, 0, id);
    Polynomial uv = column_inner(l, 0, 1, id);
    PolyOp mul_uu = multiply_by(uu);
    PolyOp mul_uv = multiply_by(uv);
    auto scaled = [](PolyOp op, long s) {
        return PolyOp([op = std::move(op), s](const Polynomial& f) { return op(f) * GaussRational(s); });
    };
    auto plus_const = [](PolyOp op, long s) {
        return PolyOp([op = std::move(op), s](const Polynomial& f) { return op(f) + f * GaussRational(s); });
    };
    auto sum = [](PolyOp a, PolyOp b) {
        return PolyOp([a = std::move(a), b = std::move(b)](const Polynomial& f) { return a(f) + b(f); });
    };

    struct Relation {
        const char* name;
        PolyOp lhs;
        PolyOp rhs;
    };
    std::vector<Relation> rel = {
        {"[Lap_u, u^2] = 4 E_u + 2d", commutator(lap_u, mul_uu), plus_const(scaled(eu, 4), 2L * d)},
        {"[<u,grad_v>, <grad_u,grad_v>] = -Lap_v", commutator(u_gv, grad_uv), scaled(lap_v, -1)},
        {"[<grad_u,grad_v>, u^2] = 2 <u,grad_v>", commutator(grad_uv, mul_uu), scaled(u_gv, 2)},
        {"[Lap_u, <u,grad_v>] = 2 <grad_u,grad_v>", commutator(lap_u, u_gv), scaled(grad_uv, 2)},
        {"[<v,grad_u>, u^2] = 2 <u,v>", commutator(v_gu, mul_uu), scaled(mul_uv, 2)},
        {"[<u,grad_v>, <u,v>] = u^2", commutator(u_gv, mul_uv), mul_uu},
        {"[Lap_u, <u,v>] = 2 <v,grad_u>", commutator(lap_u, mul_uv), scaled(v_gu, 2)},
        {"[<grad_u,grad_v>, <u,v>] = E_u + E_v + d", commutator(grad_uv, mul_uv), plus_const(sum(eu, ev), d)},
    };

    CheckReport rep;
    rep.relations = static_cast<int>(rel.size());
    std::mt19937_64 rng(seed);
    for (int t = 0; t <= trials; ++t) {
        // trial 0 is the constant polynomial 1
        Polynomial f = t == 0 ? Polynomial::constant(l, GaussRational(1)) : random_polynomial(l, 5, rng);
        for (const auto& r : rel) {
            ++rep.applications;
            if (!(r.lhs(f) == r.rhs(f))) {
                rep.passed = false;
                rep.failed = r.name;
                rep.witness = f.to_json();
                return rep;
            }
        }
    }
    return rep;
}

}  // namespace haarint
