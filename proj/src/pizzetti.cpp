#include "haarint/pizzetti.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace haarint {

Engine parse_engine(const std::string& s) {
    if (s == "auto") return Engine::Auto;
    if (s == "sphere") return Engine::Sphere;
    if (s == "codim2") return Engine::Codim2;
    if (s == "so2") return Engine::So2;
    if (s == "clifford") return Engine::Clifford;
    if (s == "recursion") return Engine::Recursion;
    throw std::invalid_argument("unknown engine '" + s + "'");
}

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::Auto: return "auto";
        case Engine::Sphere: return "sphere";
        case Engine::Codim2: return "codim2";
        case Engine::So2: return "so2";
        case Engine::Clifford: return "clifford";
        case Engine::Recursion: return "recursion";
    }
    return "?";
}

Rational sphere_coefficient(const Rational& nu_plus_one, int j) {
    Rational d = rising(nu_plus_one, j) * factorial(j);
    d *= Rational(mpz_class(1) << (2 * j));
    return 1 / d;
}

Rational codim2_coefficient(const Rational& a, const Rational& b, int j, int l) {
    Rational d = rising(a, j) * rising(b, l) * factorial(j - 2 * l) * factorial(l);
    d *= Rational(mpz_class(1) << (2 * j));
    return 1 / d;
}

namespace {

// sum_j sum_l c(j, l) (A^(j-2l) B^l f_2j)(0), with f_2j the degree-2j part.
template <class Coef>
GaussRational two_operator_series(const DiffOp& A, const DiffOp& B, const Polynomial& f, Coef coef) {
    GaussRational total;
    const int deg = f.degree();
    for (int j = 0; 2 * j <= deg; ++j) {
        Polynomial g = f.homogeneous_part(2 * j);
        if (g.is_zero()) continue;
        Polynomial bl = g;
        for (int l = 0; 2 * l <= j; ++l) {
            if (l > 0) bl = op_apply(B, bl);
            if (bl.is_zero()) break;
            Polynomial h = bl;
            for (int i = 0; i < j - 2 * l && !h.is_zero(); ++i) h = op_apply(A, h);
            GaussRational c = h.constant_term();
            if (!c.is_zero()) total += c * GaussRational(coef(j, l));
        }
    }
    return total;
}

struct OpCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int, int>, InvariantOps> ops;
};

OpCache& cache() {
    static OpCache c;
    return c;
}

// The codim-2 engine builds I1, I2 from the complex gradient matrix (Newton's
// identities) for beta = 2, 4 and from the pairing operators for beta = 1.
InvariantOps codim2_ops(const StiefelSpec& spec) {
    auto key = std::make_tuple(0, spec.beta, spec.n, spec.k);
    {
        std::lock_guard<std::mutex> lock(cache().mu);
        auto it = cache().ops.find(key);
        if (it != cache().ops.end()) return it->second;
    }
    InvariantOps ops;
    if (spec.beta == 1) {
        ops = invariant_ops(spec);
    } else {
        GradientInvariants g = gradient_matrix_invariants(spec, 2);
        ops = {g.elementary[0], g.elementary[1]};
    }
    std::lock_guard<std::mutex> lock(cache().mu);
    cache().ops.emplace(key, ops);
    return ops;
}

void require_layout(const Polynomial& f, const CoordLayout& l) {
    if (!(f.layout() == l)) throw std::invalid_argument("polynomial layout does not match the manifold");
}

}  // namespace

GaussRational sphere_integrate(int N, const Polynomial& f) {
    if (N < 2) throw std::invalid_argument("sphere_integrate needs N >= 2");
    if (f.layout().dim() != N) throw std::invalid_argument("polynomial dimension must equal N");
    const CoordLayout& l = f.layout();
    Polynomial lap(l);
    for (int i = 0; i < N; ++i) lap.add_term(Monomial::var(static_cast<std::uint32_t>(i), 2), GaussRational(1));
    DiffOp L(lap);
    const Rational half_n = frac(N, 2);
    GaussRational total;
    for (int j = 0; 2 * j <= f.degree(); ++j) {
        Polynomial g = f.homogeneous_part(2 * j);
        for (int i = 0; i < j && !g.is_zero(); ++i) g = op_apply(L, g);
        GaussRational c = g.constant_term();
        if (!c.is_zero()) total += c * GaussRational(sphere_coefficient(half_n, j));
    }
    return total;
}

GaussRational codim2_integrate(const StiefelSpec& spec, const Polynomial& f) {
    if (spec.k != 2) throw std::invalid_argument("codim2_integrate needs k = 2");
    require_layout(f, spec.layout);
    InvariantOps ops = codim2_ops(spec);
    const Rational a = frac(spec.beta * spec.n, 2);
    const Rational b = frac(spec.beta * (spec.n - 1), 2);
    return two_operator_series(ops.I1, ops.I2, f, [&](int j, int l) { return codim2_coefficient(a, b, j, l); });
}

GaussRational so2_integrate(const Polynomial& f) {
    StiefelSpec spec(1, 2, 2);
    require_layout(f, spec.layout);
    // 1 + u1 v2 - u2 v1 with u = (x0, x1), v = (x2, x3)
    Polynomial w = Polynomial::constant(spec.layout, GaussRational(1));
    w.add_term(Monomial({{0, 1}, {3, 1}}), GaussRational(1));
    w.add_term(Monomial({{1, 1}, {2, 1}}), GaussRational(-1));
    return codim2_integrate(spec, w * f);
}

GaussRational clifford_functional(int kappa, int m, const JSet& js, const Polynomial& f) {
    const CoordLayout& l = f.layout();
    if (l.k() != 2 || l.column_dim() != kappa * m || js.d != kappa * m || js.kappa() != kappa)
        throw std::invalid_argument("clifford_functional: dimension mismatch");
    if (m < 2) throw std::invalid_argument("clifford_functional needs m > 1");
    InvariantOps ops = invariant_ops(l, js);
    const Rational a = frac(kappa * m, 2);
    const Rational b = frac(kappa * (m - 1), 2);
    return two_operator_series(ops.I1, ops.I2, f, [&](int j, int ll) { return codim2_coefficient(a, b, j, ll); });
}

Polynomial t_operator(const StiefelSpec& spec, int kcur, const Polynomial& f) {
    if (kcur < 1 || kcur > spec.k) throw std::out_of_range("kcur out of range");
    require_layout(f, spec.layout);
    const CoordLayout& l = spec.layout;
    const int c = kcur - 1;
    const JSet js = build_jset(spec.beta, spec.n);
    // L = Delta_c - sum_{i<c, J} (sum_a s_a x_{i,a} d_{c,J(a)})^2
    //   = sum_{p,q} K_pq(x) d_{c,p} d_{c,q},  K_pq = delta_pq - sum s_a s_b x_{i,a} x_{i,b} over J(a) = p, J(b) = q.
    const int d = l.column_dim();
    std::vector<std::map<std::pair<std::uint32_t, std::uint32_t>, long>> K(d * d);
    for (int i = 0; i < c; ++i)
        for (const auto& J : js.mats)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    if (J.sign[a] == 0 || J.sign[b] == 0) continue;
                    auto x = static_cast<std::uint32_t>(i * d + a), y = static_cast<std::uint32_t>(i * d + b);
                    if (x > y) std::swap(x, y);
                    K[J.perm[a] * d + J.perm[b]][{x, y}] -= J.sign[a] * J.sign[b];
                }
    const auto base = static_cast<std::uint32_t>(c * d);
    // Terms are accumulated in a hash map keyed by the sorted exponent list,
    // which avoids building a Monomial for every partial product.
    using Key = std::vector<Monomial::Entry>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = 1469598103934665603ull;
            for (const auto& [v, e] : k) h = (h ^ (std::size_t(v) << 8 ^ e)) * 1099511628211ull;
            return h;
        }
    };
    // Coefficients are cleared to integers over a common denominator so the
    // inner loop only does mpz multiply-adds.
    struct ZC {
        mpz_class re, im;
    };
    auto addmul = [](mpz_class& acc, const mpz_class& w, long k) {
        if (k >= 0)
            mpz_addmul_ui(acc.get_mpz_t(), w.get_mpz_t(), static_cast<unsigned long>(k));
        else
            mpz_submul_ui(acc.get_mpz_t(), w.get_mpz_t(), static_cast<unsigned long>(-k));
    };
    auto L = [&](const Polynomial& g) {
        mpz_class den = 1;
        for (const auto& [m, w] : g.terms()) {
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), w.re.get_den_mpz_t());
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), w.im.get_den_mpz_t());
        }
        std::unordered_map<Key, ZC, KeyHash> acc;
        acc.reserve(g.size() * 4);
        Key buf;
        Monomial::Entry extra[2];
        ZC w;
        auto push = [&](std::uint32_t v, std::uint32_t e) {
            if (e == 0) return;
            if (!buf.empty() && buf.back().first == v)
                buf.back().second += e;
            else
                buf.emplace_back(v, e);
        };
        auto emit = [&](const Key& ent, std::size_t s1, std::size_t s2, int nextra, long k) {
            buf.clear();
            int x = 0;
            for (std::size_t t = 0; t < ent.size(); ++t) {
                while (x < nextra && extra[x].first <= ent[t].first) push(extra[x].first, extra[x].second), ++x;
                std::uint32_t e = ent[t].second - (t == s1) - (t == s2);
                push(ent[t].first, e);
            }
            while (x < nextra) push(extra[x].first, extra[x].second), ++x;
            auto it = acc.find(buf);
            if (it == acc.end()) it = acc.emplace(buf, ZC{}).first;
            addmul(it->second.re, w.re, k);
            if (w.im != 0) addmul(it->second.im, w.im, k);
        };
        for (const auto& [m, c] : g.terms()) {
            w.re = c.re.get_num() * (den / c.re.get_den());
            w.im = c.im.get_num() * (den / c.im.get_den());
            const Key& ent = m.entries();
            for (std::size_t s1 = 0; s1 < ent.size(); ++s1) {
                const auto [vp, ep] = ent[s1];
                if (vp < base || vp >= base + d) continue;
                for (std::size_t s2 = 0; s2 < ent.size(); ++s2) {
                    const auto [vq, eq] = ent[s2];
                    if (vq < base || vq >= base + d) continue;
                    long mult;
                    if (s1 == s2) {
                        if (ep < 2) continue;
                        mult = static_cast<long>(ep) * (ep - 1);
                    } else {
                        mult = static_cast<long>(ep) * eq;
                    }
                    if (vp == vq) emit(ent, s1, s2, 0, mult);
                    for (const auto& [xy, k] : K[(vp - base) * d + (vq - base)]) {
                        if (k == 0) continue;
                        if (xy.first == xy.second) {
                            extra[0] = {xy.first, 2};
                            emit(ent, s1, s2, 1, mult * k);
                        } else {
                            extra[0] = {xy.first, 1};
                            extra[1] = {xy.second, 1};
                            emit(ent, s1, s2, 2, mult * k);
                        }
                    }
                }
            }
        }
        Polynomial r(l);
        const Rational dq(den);
        for (auto& [key, v] : acc) {
            if (v.re == 0 && v.im == 0) continue;
            r.add_term(Monomial(key), GaussRational(Rational(v.re) / dq, Rational(v.im) / dq));
        }
        return r;
    };
    const Rational nu1 = frac(spec.beta * (spec.n - kcur + 1), 2);
    // Horner form of sum_j c_j L^j f_2j, using c_j / c_(j-1) = 1 / (4 j (nu1 + j - 1)).
    const int top = std::max(f.degree(), 0) / 2;
    Polynomial acc = f.column_degree_part(c, 2 * top);
    for (int j = top; j >= 1; --j) {
        Polynomial next = f.column_degree_part(c, 2 * j - 2);
        if (!acc.is_zero()) next += L(acc) * GaussRational(1 / (4 * j * (nu1 + j - 1)));
        acc = std::move(next);
    }
    return acc;
}

GaussRational recursion_integrate(const StiefelSpec& spec, const Polynomial& f) {
    if (spec.beta == 1 && spec.k == spec.n && spec.n > 2)
        throw std::invalid_argument("recursion_integrate: beta = 1 with k = n > 2 is not supported");
    require_layout(f, spec.layout);
    Polynomial g = f;
    for (int kc = spec.k; kc >= 1 && !g.is_zero(); --kc) g = t_operator(spec, kc, g);
    if (g.degree() > 0) throw std::logic_error("recursion left a non-constant polynomial");
    return g.constant_term();
}

bool engine_supports(Engine e, const StiefelSpec& s) {
    switch (e) {
        case Engine::Auto: return engine_supports(resolve_engine(e, s), s);
        case Engine::Sphere: return s.k == 1 && s.beta * s.n >= 2;
        case Engine::Codim2: return s.k == 2 && s.n >= 2;
        case Engine::So2: return s.beta == 1 && s.n == 2 && s.k == 2;
        case Engine::Clifford: return s.k == 2 && s.n >= 2;
        case Engine::Recursion: return s.beta * s.n >= 2 && !(s.beta == 1 && s.k == s.n && s.n > 2);
    }
    return false;
}

Engine resolve_engine(Engine e, const StiefelSpec& s) {
    if (e != Engine::Auto) return e;
    if (s.k == 1) return Engine::Sphere;
    if (s.beta == 1 && s.n == 2 && s.k == 2) return Engine::So2;
    if (s.k == 2) return Engine::Codim2;
    return Engine::Recursion;
}

GaussRational integrate(Engine e, const StiefelSpec& spec, const Polynomial& f) {
    e = resolve_engine(e, spec);
    switch (e) {
        case Engine::Sphere: return sphere_integrate(spec.layout.dim(), f);
        case Engine::Codim2: return codim2_integrate(spec, f);
        case Engine::So2: return so2_integrate(f);
        case Engine::Clifford: {
            JSet js = build_general_jset(spec.beta, spec.beta * spec.n);
            return clifford_functional(spec.beta, spec.n, js, f);
        }
        case Engine::Recursion: return recursion_integrate(spec, f);
        case Engine::Auto: break;
    }
    throw std::logic_error("unresolved engine");
}

CheckReport check_pairing_invariance(const StiefelSpec& spec, Engine e, int trials, std::uint64_t seed, int max_degree) {
    if (!engine_supports(e, spec)) throw std::invalid_argument("engine does not support this manifold");
    const CoordLayout& l = spec.layout;
    const JSet js = build_jset(spec.beta, spec.n);
    std::mt19937_64 rng(seed);
    CheckReport rep;
    rep.relations = 0;
    for (int t = 0; t < trials; ++t) {
        Polynomial f = random_polynomial(l, max_degree, rng);
        GaussRational base = integrate(e, spec, f);
        for (int i = 0; i < spec.k; ++i)
            for (int j = i; j < spec.k; ++j)
                for (int q = 0; q < js.kappa(); ++q) {
                    Polynomial g = column_inner(l, i, j, js.mats[q]) * f;
                    GaussRational want = (i == j && q == 0) ? base : GaussRational();
                    ++rep.applications;
                    if (!(integrate(e, spec, g) == want)) {
                        rep.passed = false;
                        rep.failed = "pairing (" + std::to_string(i) + "," + std::to_string(j) + ") with J^(" +
                                     std::to_string(q) + ")";
                        rep.witness = f.to_json();
                        return rep;
                    }
                }
    }
    rep.relations = spec.k * (spec.k + 1) / 2 * js.kappa();
    return rep;
}

void random_monomial_group_element(const StiefelSpec& spec, std::mt19937_64& rng, std::vector<int>& perm,
                                   std::vector<int>& sign) {
    // component images of e_t * x, t = 0..3 (Hamilton product), as (source, sign)
    static const int src[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const int sgn[4][4] = {{1, 1, 1, 1}, {-1, 1, -1, 1}, {-1, 1, 1, -1}, {-1, -1, 1, 1}};
    const CoordLayout& l = spec.layout;
    const int n = spec.n;
    std::vector<int> rows(n);
    for (int r = 0; r < n; ++r) rows[r] = r;
    std::shuffle(rows.begin(), rows.end(), rng);
    std::uniform_int_distribution<int> unit(0, spec.beta - 1);
    std::bernoulli_distribution neg(0.5);
    std::vector<int> t(n), s(n);
    for (int r = 0; r < n; ++r) {
        t[r] = unit(rng);
        s[r] = neg(rng) ? -1 : 1;
    }
    perm.assign(l.dim(), 0);
    sign.assign(l.dim(), 1);
    for (int c = 0; c < spec.k; ++c)
        for (int r = 0; r < n; ++r)
            for (int comp = 0; comp < spec.beta; ++comp) {
                int idx = l.index(c, comp, r);
                perm[idx] = l.index(c, src[t[r]][comp], rows[r]);
                sign[idx] = s[r] * sgn[t[r]][comp];
            }
}

CheckReport check_left_invariance(const StiefelSpec& spec, Engine e, int trials, std::uint64_t seed) {
    if (!engine_supports(e, spec)) throw std::invalid_argument("engine does not support this manifold");
    std::mt19937_64 rng(seed);
    CheckReport rep;
    rep.relations = 2;
    std::vector<int> perm, sign;
    for (int t = 0; t < trials; ++t) {
        Polynomial f = random_polynomial(spec.layout, 4, rng);
        random_monomial_group_element(spec, rng, perm, sign);
        // SO(2) is only invariant under determinant-one elements; the
        // functional there is checked against quadrature instead.
        bool skip_perm = resolve_engine(e, spec) == Engine::So2;
        ++rep.applications;
        if (!skip_perm && !(integrate(e, spec, f.substitute_signed(perm, sign)) == integrate(e, spec, f))) {
            rep.passed = false;
            rep.failed = "left invariance";
            rep.witness = f.to_json();
            return rep;
        }
        Polynomial odd(spec.layout);
        for (int d = 1; d <= f.degree(); d += 2) odd += f.homogeneous_part(d);
        ++rep.applications;
        if (!integrate(e, spec, odd).is_zero()) {
            rep.passed = false;
            rep.failed = "odd parity";
            rep.witness = odd.to_json();
            return rep;
        }
    }
    return rep;
}

CheckReport check_clifford_lemmas(int kappa, int m, int trials, std::uint64_t seed, int lmax) {
    const CoordLayout l = CoordLayout::generic(kappa, m, 2);
    const JSet js = build_general_jset(kappa, kappa * m);
    const InvariantOps ops = invariant_ops(l, js);
    const DiffOp& A = ops.I1;
    const DiffOp& B = ops.I2;
    const DiffOp lap_v = column_laplacian(l, 1);
    const PolyOp euler_u = euler_op(l, 0);
    const Polynomial uu = column_inner(l, 0, 0, js.mats[0]);
    std::vector<PolyOp> mixed;
    for (const auto& J : js.mats) mixed.push_back(compose(vec_grad_op(l, 0, 1, J), as_polyop(pair_op(l, 0, 1, J))));

    // B_u^(l) f = 4l ((E_u + kappa(m-1)/2 + l - 1) Lap_v f - sum_j <u,J grad_v><grad_u,J grad_v> f)
    auto b_u = [&](int ll, const Polynomial& f) {
        Polynomial lv = op_apply(lap_v, f);
        Polynomial r = euler_u(lv) + lv * GaussRational(frac(kappa * (m - 1), 2) + (ll - 1));
        for (const auto& op : mixed) r -= op(f);
        return r * GaussRational(4L * ll);
    };
    auto apply_pow = [](const DiffOp& op, int p, Polynomial f) {
        for (int i = 0; i < p && !f.is_zero(); ++i) f = op_apply(op, f);
        return f;
    };

    std::mt19937_64 rng(seed);
    CheckReport rep;
    rep.relations = 2 * lmax + lmax * lmax;
    for (int t = 0; t < trials; ++t) {
        Polynomial f = random_polynomial(l, 5, rng);
        for (int ll = 1; ll <= lmax; ++ll) {
            Polynomial lhs = apply_pow(B, ll, uu * f) - uu * apply_pow(B, ll, f);
            Polynomial rhs = b_u(ll, apply_pow(B, ll - 1, f));
            ++rep.applications;
            if (!(lhs == rhs)) {
                rep.passed = false;
                rep.failed = "[B^" + std::to_string(ll) + ", u^2] = B_u^(" + std::to_string(ll) + ") B^" + std::to_string(ll - 1);
                rep.witness = f.to_json();
                return rep;
            }
            for (int p = 1; p <= lmax; ++p) {
                Polynomial l2 = apply_pow(A, p, b_u(ll, f)) - b_u(ll, apply_pow(A, p, f));
                Polynomial r2 = apply_pow(A, p - 1, op_apply(B, f)) * GaussRational(8L * p * ll);
                ++rep.applications;
                if (!(l2 == r2)) {
                    rep.passed = false;
                    rep.failed = "[A^" + std::to_string(p) + ", B_u^(" + std::to_string(ll) + ")] = 8 p l A^(p-1) B";
                    rep.witness = f.to_json();
                    return rep;
                }
            }
        }
    }
    return rep;
}

}  // namespace haarint
