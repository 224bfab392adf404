#include "haarint/iz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace haarint {

namespace {

// Four-variable polynomial keyed by packed 16-bit exponents.
using Key = std::uint64_t;
using Poly4 = std::map<Key, Rational>;

constexpr Key unit(int v) { return Key(1) << (16 * v); }
constexpr int expo(Key k, int v) { return static_cast<int>((k >> (16 * v)) & 0xffff); }
constexpr Key kE4 = unit(0) + unit(1) + unit(2) + unit(3);

void add_to(Poly4& p, Key k, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = p.try_emplace(k, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

Poly4 from_poly(const Polynomial& f) {
    if (f.layout().dim() != 4) throw std::invalid_argument("expected a polynomial in E_1..E_4");
    Poly4 p;
    for (const auto& [m, c] : f.terms()) {
        if (c.im != 0) throw std::invalid_argument("expected real coefficients");
        Key k = 0;
        for (const auto& [idx, e] : m.entries()) {
            if (e > 0xffff) throw std::overflow_error("exponent too large");
            k += Key(e) << (16 * idx);
        }
        add_to(p, k, c.re);
    }
    return p;
}

Polynomial to_poly(const Poly4& p) {
    Polynomial f(sym4_layout());
    for (const auto& [k, c] : p) {
        std::vector<Monomial::Entry> ent;
        for (int v = 0; v < 4; ++v)
            if (expo(k, v)) ent.emplace_back(v, expo(k, v));
        f.add_term(Monomial(ent), GaussRational(c));
    }
    return f;
}

Key permute(Key k, const std::array<int, 4>& perm) {
    Key r = 0;
    for (int v = 0; v < 4; ++v) r += Key(expo(k, v)) << (16 * perm[v]);
    return r;
}

bool symmetric(const Poly4& p) {
    // (0 1) and (0 1 2 3) generate S_4.
    for (const auto& perm : {std::array<int, 4>{1, 0, 2, 3}, std::array<int, 4>{1, 2, 3, 0}})
        for (const auto& [k, c] : p) {
            auto it = p.find(permute(k, perm));
            if (it == p.end() || it->second != c) return false;
        }
    return true;
}

// Exact quotient by (x_a - x_b), grouping terms into binary forms in (x_a, x_b).
Poly4 divide_difference(const Poly4& g, int a, int b) {
    std::map<std::pair<Key, int>, std::map<int, Rational>> groups;
    const Key mask = (Key(0xffff) << (16 * a)) | (Key(0xffff) << (16 * b));
    for (const auto& [k, c] : g) {
        const int ea = expo(k, a), eb = expo(k, b);
        groups[{k & ~mask, ea + eb}][ea] = c;
    }
    Poly4 q;
    for (const auto& [gk, coefs] : groups) {
        const auto [rest, d] = gk;
        Rational acc = 0;
        for (int s = d - 1; s >= 0; --s) {
            if (auto it = coefs.find(s + 1); it != coefs.end()) acc += it->second;
            add_to(q, rest + Key(s) * unit(a) + Key(d - 1 - s) * unit(b), acc);
        }
        Rational total = acc;
        if (auto it = coefs.find(0); it != coefs.end()) total += it->second;
        if (total != 0) throw std::logic_error("exact division by (E_a - E_b) failed");
    }
    return q;
}

Poly4 divide_vandermonde(Poly4 g) {
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) g = divide_difference(g, a, b);
    return g;
}

Poly4 diff(const Poly4& p, int v) {
    Poly4 r;
    for (const auto& [k, c] : p)
        if (int e = expo(k, v)) add_to(r, k - unit(v), c * e);
    return r;
}

Poly4 mul_key(const Poly4& p, Key m) {
    Poly4 r;
    for (const auto& [k, c] : p) r.emplace(k + m, c);
    return r;
}

Poly4 plus(Poly4 a, const Poly4& b, const Rational& s = 1) {
    for (const auto& [k, c] : b) add_to(a, k, c * s);
    return a;
}

Poly4 d3(const Poly4& f) {
    if (!symmetric(f)) throw std::invalid_argument("apply_d3: input is not symmetric");
    Poly4 r;
    const Rational minus_half = frac(-1, 2);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            Poly4 g;
            for (const auto& [k, c] : f) {
                const int ea = expo(k, a), eb = expo(k, b);
                if (ea && eb) add_to(r, k + unit(a) + unit(b), c * (ea * eb));
                if (ea) add_to(g, k + unit(a), c * ea);
                if (eb) add_to(g, k + unit(b), -c * eb);
            }
            for (const auto& [k, c] : divide_difference(g, a, b)) add_to(r, k + unit(a) + unit(b), c * minus_half);
        }
    if (!symmetric(r)) throw std::logic_error("apply_d3: output is not symmetric");
    return r;
}

Poly4 schur(int q) {
    const int pw[4] = {1, 2, 3, q + 4};
    std::array<int, 4> sigma = {0, 1, 2, 3};
    Poly4 det;
    do {
        int inv = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) inv += sigma[i] > sigma[j];
        Key k = 0;
        for (int b = 0; b < 4; ++b) k += Key(pw[sigma[b]]) * unit(b);
        add_to(det, k, inv % 2 ? Rational(-1) : Rational(1));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return divide_vandermonde(det);
}

struct Term {
    std::array<int, 4> e;
    double c;
};

struct Entry {
    Poly4 exact;              // D_3^p schur(q)
    std::vector<Term> eval;   // exact / e4 as doubles
};

std::mutex cache_mu;
std::map<std::pair<int, int>, Entry> cache;

std::vector<Term> over_e4(const Poly4& p) {
    std::vector<Term> out;
    for (const auto& [k, c] : p) {
        if (expo(k, 0) == 0 || expo(k, 1) == 0 || expo(k, 2) == 0 || expo(k, 3) == 0)
            throw std::logic_error("iz: term not divisible by det H");
        const Key r = k - kE4;
        out.push_back({{expo(r, 0), expo(r, 1), expo(r, 2), expo(r, 3)}, to_double(c)});
    }
    return out;
}

// Caller holds cache_mu.
const Entry& entry(int q, int p) {
    auto it = cache.find({q, p});
    if (it != cache.end()) return it->second;
    int start = p;
    while (start > 0 && !cache.count({q, start - 1})) --start;
    for (int s = start; s <= p; ++s) {
        Entry e;
        e.exact = s == 0 ? schur(q) : d3(cache.at({q, s - 1}).exact);
        e.eval = over_e4(e.exact);
        cache.emplace(std::pair{q, s}, std::move(e));
    }
    return cache.at({q, p});
}

double evaluate(const std::vector<Term>& terms, const std::array<double, 4>& E) {
    double sum = 0, comp = 0;
    for (const auto& t : terms) {
        double v = t.c;
        for (int a = 0; a < 4; ++a)
            for (int i = 0; i < t.e[a]; ++i) v *= E[a];
        const double s = sum + v;
        comp += std::fabs(sum) >= std::fabs(v) ? (sum - s) + v : (v - s) + sum;
        sum = s;
    }
    return sum + comp;
}

}  // namespace

CoordLayout sym4_layout() { return CoordLayout::generic(1, 4, 1); }

Polynomial schur_term(int j, int p) {
    if (p < 0 || j - 2 * p < 0) throw std::invalid_argument("schur_term: need 0 <= 2p <= j");
    return to_poly(schur(j - 2 * p));
}

Polynomial apply_d3(const Polynomial& f) { return to_poly(d3(from_poly(f))); }

bool is_symmetric4(const Polynomial& f) { return symmetric(from_poly(f)); }

SumConvention parse_convention(const std::string& s) {
    if (s == "paper") return SumConvention::FromOne;
    if (s == "from_zero") return SumConvention::FromZero;
    throw std::invalid_argument("unknown convention: " + s);
}

std::string convention_name(SumConvention c) { return c == SumConvention::FromOne ? "paper" : "from_zero"; }

Rational iz_coefficient(int j, int p, IzCoefficient coef) {
    Rational r = Rational(mpz_class(1) << (j + 2 * p)) / (factorial(j + 1) * factorial(2 * p + 1));
    if (coef == IzCoefficient::ExtraFactorial) r *= factorial(j + 2 * p);
    return j % 2 ? Rational(-r) : r;
}

IzResult iz_series(const std::array<double, 4>& E, int jmax, SumConvention conv, IzCoefficient coef) {
    for (double e : E)
        if (!std::isfinite(e)) throw std::domain_error("iz_series: non-finite H");
    if (jmax < 0 || jmax > 60) throw std::invalid_argument("iz_series: jmax must be in [0, 60]");
    IzResult res;
    double sum = 0, comp = 0, prev = -1;
    const int p0 = conv == SumConvention::FromOne ? 1 : 0;
    for (int j = 0; j <= jmax; ++j) {
        double shell = 0;
        for (int p = p0; 2 * p <= j; ++p) {
            double v;
            {
                std::lock_guard lock(cache_mu);
                v = evaluate(entry(j - 2 * p, p).eval, E);
            }
            shell += to_double(iz_coefficient(j, p, coef)) * v;
        }
        const double s = sum + shell;
        comp += std::fabs(sum) >= std::fabs(shell) ? (sum - s) + shell : (shell - s) + sum;
        sum = s;
        res.jmax = j;
        res.tail_estimate = std::fabs(shell);
        const double scale = 1e-10 * std::fabs(sum + comp);
        if (j >= 1 && prev >= 0 && std::fabs(shell) <= scale && prev <= scale) {
            res.converged = true;
            break;
        }
        prev = std::fabs(shell);
    }
    res.value = sum + comp;
    res.truncated = !res.converged;
    return res;
}

McEstimate iz_monte_carlo(const std::array<double, 4>& E, std::uint64_t samples, std::uint64_t seed, int threads) {
    const StiefelSpec spec(1, 4, 2);
    return mc_integrate(
        spec,
        [&](std::span<const double> x) {
            double t = 0;
            for (int a = 0; a < 4; ++a) t += E[a] * (x[a] * x[a] + x[4 + a] * x[4 + a]);
            return std::exp(-2 * t);
        },
        samples, seed, threads);
}

namespace {

// Coefficient of lambda^s in Delta_4(k) * D(lambda) applied to f:
// (-1)^s sum_{|S|=s} sum_sigma sgn(sigma) prod_{a in S} k_a^{c_a} prod_{a not in S} A_a f,
// with c_a = 4 - sigma(a) and A_a = k_a^{c_a} d_a + (c_a/2) k_a^{c_a - 1}.
Poly4 dhat_numerator(int s, const Poly4& f) {
    Poly4 total;
    std::array<int, 4> sigma = {0, 1, 2, 3};
    do {
        int inv = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) inv += sigma[i] > sigma[j];
        for (int S = 0; S < 16; ++S) {
            if (__builtin_popcount(S) != s) continue;
            Poly4 g = f;
            for (int a = 0; a < 4; ++a) {
                const int c = 3 - sigma[a];
                if (S & (1 << a)) {
                    g = mul_key(g, Key(c) * unit(a));
                } else {
                    Poly4 h = mul_key(diff(g, a), Key(c) * unit(a));
                    if (c > 0) h = plus(h, mul_key(g, Key(c - 1) * unit(a)), frac(c, 2));
                    g = std::move(h);
                }
            }
            const bool neg = (inv + s) % 2;
            total = plus(total, g, neg ? Rational(-1) : Rational(1));
        }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

Poly4 dhat(int s, const Poly4& f) { return divide_vandermonde(dhat_numerator(s, f)); }

Poly4 e4_power(int a) {
    Poly4 p;
    p.emplace(Key(a) * kE4, Rational(1));
    return p;
}

}  // namespace

SekiguchiReport sekiguchi_check(int a_max) {
    if (a_max < 1 || a_max > 5) throw std::invalid_argument("sekiguchi_check: a_max must be in [1, 5]");
    SekiguchiReport rep;
    auto fail = [&](const std::string& what) {
        if (rep.passed) rep.failure = what;
        rep.passed = false;
    };
    Poly4 trk;
    for (int v = 0; v < 4; ++v) trk.emplace(unit(v), Rational(1));
    auto times = [](const Poly4& a, const Poly4& b) {
        Poly4 r;
        for (const auto& [ka, ca] : a)
            for (const auto& [kb, cb] : b) add_to(r, ka + kb, ca * cb);
        return r;
    };
    for (int a = 1; a <= a_max; ++a) {
        const std::string tag = " on det^" + std::to_string(a) + " k";
        const Poly4 f = e4_power(a);
        // D1 det^a k = c det^(a-1) k
        const Poly4 d1 = dhat(0, f);
        ++rep.checks;
        const Rational want = Rational(2 * a * (2 * a + 1) * (2 * a + 2) * (2 * a + 3)) / 16;
        Rational got = 0;
        if (d1.size() == 1 && d1.begin()->first == Key(a - 1) * kE4) got = d1.begin()->second;
        else if (!d1.empty()) fail("D1 result is not a multiple of det^(a-1) k" + tag);
        rep.d1_coefficients.push_back(got);
        if (got != want) fail("D1 coefficient " + to_string(got) + " != " + to_string(want) + tag);
        // D4 = sum_a d_a
        Poly4 grad;
        for (int v = 0; v < 4; ++v) grad = plus(grad, diff(f, v));
        ++rep.checks;
        if (plus(dhat(3, f), grad) != Poly4{}) fail("D4 != sum of partials" + tag);
        // D2 = [D1, tr k]
        ++rep.checks;
        const Poly4 comm = plus(dhat(0, times(trk, f)), times(trk, d1), -1);
        if (plus(dhat(1, f), comm) != Poly4{}) fail("D2 != [D1, tr k]" + tag);
        // D3 = sum_{a<b} [d_a d_b - 1/2 (d_a - d_b) / (k_a - k_b)]
        Poly4 d3k;
        for (int x = 0; x < 4; ++x)
            for (int y = x + 1; y < 4; ++y) {
                d3k = plus(d3k, diff(diff(f, x), y));
                d3k = plus(d3k, divide_difference(plus(diff(f, x), diff(f, y), -1), x, y), frac(-1, 2));
            }
        ++rep.checks;
        if (dhat(2, f) != d3k) fail("D3 closed form mismatch" + tag);
        ++rep.checks;
        if (dhat(4, f) != f) fail("leading coefficient of D(lambda) is not 1" + tag);
    }
    return rep;
}

}  // namespace haarint
