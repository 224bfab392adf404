#include "haarint/kernels.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace haarint {

namespace {

constexpr double kSeriesCut = 2.0;
constexpr int kPairDegree = 60;
constexpr double kRaySeriesCut = 3.0;
constexpr int kRayOrder = 40;

struct Neumaier {
    double sum = 0, comp = 0;
    void add(double v) {
        double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

void check_lambdas(std::span<const double> l, int k) {
    if (k < 1) throw std::invalid_argument("kernel: need n - m >= 1");
    if (static_cast<int>(l.size()) != k)
        throw std::invalid_argument("kernel: expected " + std::to_string(k) + " singular values");
    for (double x : l)
        if (!std::isfinite(x) || x <= 0) throw std::domain_error("kernel: singular values must be positive");
    for (std::size_t a = 0; a < l.size(); ++a)
        for (std::size_t b = a + 1; b < l.size(); ++b)
            if (std::fabs(l[a] - l[b]) < kGapTolerance * std::max(l[a], l[b]))
                throw std::domain_error("kernel: degenerate singular values");
}

// (-1/4)^j nu! / (j! (j+nu)!), the Taylor coefficients of Psi_nu in X = x^2.
std::vector<double> psi_coefs(int nu, int order) {
    std::vector<double> c(order + 1);
    c[0] = 1;
    for (int j = 1; j <= order; ++j) c[j] = c[j - 1] * -0.25 / (j * double(j + nu));
    return c;
}

Rational phi_coef(int nu, int j) {
    if (j + nu < 0) return 0;
    Rational r = 1 / (factorial(j) * factorial(j + nu));
    r /= Rational(mpz_class(1) << (2 * j));
    return j % 2 ? Rational(-r) : r;
}

// Exact division of a homogeneous form sum_t p_t X^t Y^(d-t) by (X - Y).
std::vector<Rational> divide_x_minus_y(const std::vector<Rational>& p) {
    Rational total = 0;
    for (const auto& c : p) total += c;
    if (total != 0) throw std::logic_error("psi_tilde4: bracket not divisible by (X - Y)");
    std::vector<Rational> q(p.size() - 1);
    Rational acc = 0;
    for (int s = static_cast<int>(p.size()) - 2; s >= 0; --s) {
        acc += p[s + 1];
        q[s] = acc;
    }
    return q;
}

struct PairTable {
    Rational bracket_constant;
    std::vector<std::vector<Rational>> exact;  // [d][i]: coefficient of X^i Y^(d-i)
    std::vector<std::vector<double>> fl;
};

PairTable build_pair_table(int m) {
    const int T = kPairDegree + 3;
    auto phi = [&](int nu) {
        std::vector<Rational> c(T + 1);
        for (int j = 0; j <= T; ++j) c[j] = phi_coef(nu, j);
        return c;
    };
    const auto a = phi(2 * m - 1), b = phi(2 * m), c = phi(2 * m + 1);
    auto form = [&](int d, auto&& f) {
        std::vector<Rational> v(d + 1);
        for (int i = 0; i <= d; ++i) v[i] = f(i, d - i);
        return v;
    };
    std::vector<std::vector<Rational>> N(T), P(T + 1);
    for (int d = 0; d < T; ++d)
        N[d] = form(d, [&](int i, int j) -> Rational { return a[i] * c[j] - 2 * b[i] * b[j] + c[i] * a[j]; });
    for (int d = 0; d <= T; ++d) {
        auto M = form(d, [&](int i, int j) -> Rational { return a[i] * b[j] - b[i] * a[j]; });
        std::vector<Rational> p(d + 1);
        for (int i = 0; i <= d; ++i) {
            p[i] = -8 * M[i];
            if (d >= 1 && i >= 1) p[i] += N[d - 1][i - 1];
            if (d >= 1 && i <= d - 1) p[i] -= N[d - 1][i];
        }
        P[d] = std::move(p);
    }
    PairTable t;
    for (int d = 0; d <= T; ++d) {
        std::vector<Rational> r = P[d];
        for (int rep = 0; rep < 3 && !r.empty(); ++rep) r = divide_x_minus_y(r);
        if (d >= 3) t.exact.push_back(std::move(r));
    }
    t.bracket_constant = t.exact[0][0];
    if (t.bracket_constant == 0) throw std::logic_error("psi_tilde4: vanishing bracket constant");
    for (auto& row : t.exact) {
        std::vector<double> f;
        for (auto& x : row) {
            x /= t.bracket_constant;
            f.push_back(to_double(x));
        }
        t.fl.push_back(std::move(f));
    }
    return t;
}

const PairTable& pair_table(int m) {
    static std::mutex mu;
    static std::map<int, PairTable> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, build_pair_table(m)).first;
    return it->second;
}

template <class T>
using Series = std::vector<T>;

template <class T>
Series<T> series_mul(const Series<T>& a, const Series<T>& b, int order) {
    Series<T> r(order + 1, T(0));
    for (int i = 0; i < static_cast<int>(a.size()) && i <= order; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < static_cast<int>(b.size()) && i + j <= order; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

template <class T>
Series<T> series_pfaffian(const std::vector<std::vector<Series<T>>>& a, int order) {
    const int dim = static_cast<int>(a.size());
    std::unordered_map<std::uint32_t, Series<T>> memo;
    std::function<Series<T>(std::uint32_t)> pf = [&](std::uint32_t mask) -> Series<T> {
        if (mask == 0) {
            Series<T> one(order + 1, T(0));
            one[0] = T(1);
            return one;
        }
        if (auto it = memo.find(mask); it != memo.end()) return it->second;
        const int i = std::countr_zero(mask);
        const std::uint32_t rest = mask & ~(1u << i);
        Series<T> acc(order + 1, T(0));
        bool plus = true;
        for (std::uint32_t r = rest; r; r &= r - 1) {
            const int j = std::countr_zero(r);
            Series<T> prod = series_mul(a[i][j], pf(rest & ~(1u << j)), order);
            for (int s = 0; s <= order; ++s) acc[s] += plus ? prod[s] : T(-prod[s]);
            plus = !plus;
        }
        memo.emplace(mask, acc);
        return acc;
    };
    if (dim % 2) return Series<T>(order + 1, T(0));
    return pf((dim == 32 ? 0u : (1u << dim)) - 1);
}

template <class T>
Series<T> series_determinant(const std::vector<std::vector<Series<T>>>& a, int order) {
    const int dim = static_cast<int>(a.size());
    std::unordered_map<std::uint32_t, Series<T>> memo;
    // Rows 0..|mask|-1 against the columns in mask, expanded along the last row.
    std::function<Series<T>(std::uint32_t)> det = [&](std::uint32_t mask) -> Series<T> {
        if (mask == 0) {
            Series<T> one(order + 1, T(0));
            one[0] = T(1);
            return one;
        }
        if (auto it = memo.find(mask); it != memo.end()) return it->second;
        const int r = std::popcount(mask) - 1;
        Series<T> acc(order + 1, T(0));
        int pos = 0;
        for (std::uint32_t rest = mask; rest; rest &= rest - 1, ++pos) {
            const int c = std::countr_zero(rest);
            Series<T> prod = series_mul(a[r][c], det(mask & ~(1u << c)), order);
            const bool plus = (r + pos) % 2 == 0;
            for (int s = 0; s <= order; ++s) acc[s] += plus ? prod[s] : T(-prod[s]);
        }
        memo.emplace(mask, acc);
        return acc;
    };
    return det((1u << dim) - 1);
}

template <class T>
T vandermonde(const std::vector<T>& x) {
    T v(1);
    for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t b = a + 1; b < x.size(); ++b) v *= x[a] - x[b];
    return v;
}

// Entries of the (bordered) Pfaffian matrix along the ray s * X, truncated at `order`.
std::vector<std::vector<Series<double>>> beta4_ray_matrix(int k, int m, const std::vector<double>& X, int order) {
    if (order - 1 > kPairDegree) throw std::invalid_argument("psi_hat_beta4: series order too large");
    const auto& t = pair_table(m).fl;
    const int off = k % 2;
    const int dim = k + off;
    std::vector<std::vector<Series<double>>> A(dim, std::vector<Series<double>>(dim, Series<double>(order + 1, 0.0)));
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            auto& s = A[a + off][b + off];
            for (int d = 0; d + 1 <= order; ++d) {
                double acc = 0, xa = 1;
                for (int i = 0; i <= d; ++i) {
                    acc += t[d][i] * xa * std::pow(X[b], d - i);
                    xa *= X[a];
                }
                s[d + 1] = (X[a] - X[b]) * acc;
            }
            for (int d = 0; d <= order; ++d) A[b + off][a + off][d] = -s[d];
        }
    if (off) {
        const auto g = psi_coefs(2 * m + 1, order);
        for (int b = 0; b < k; ++b) {
            double xp = 1;
            for (int d = 0; d <= order; ++d) {
                A[0][b + 1][d] = g[d] * xp;
                A[b + 1][0][d] = -A[0][b + 1][d];
                xp *= X[b];
            }
        }
    }
    return A;
}

Rational psi_coef_exact(int nu, int j) {
    Rational r = factorial(nu) / (factorial(j) * factorial(j + nu));
    r /= Rational(mpz_class(1) << (2 * j));
    return j % 2 ? Rational(-r) : r;
}

}  // namespace

std::string method_name(KernelMethod m) {
    switch (m) {
        case KernelMethod::Bessel: return "bessel";
        case KernelMethod::DetBeta2: return "det_beta2";
        case KernelMethod::PfaffianBeta4Even: return "pfaffian_beta4_even";
        case KernelMethod::PfaffianBeta4Odd: return "pfaffian_beta4_odd";
        case KernelMethod::MomentSeries: return "moment_series";
    }
    return "?";
}

double bessel_psi(double nu, double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_psi: non-finite argument");
    if (nu < -0.5) throw std::invalid_argument("bessel_psi: order below -1/2");
    x = std::fabs(x);
    if (x <= kSeriesCut) {
        const double q = -x * x / 4;
        double term = 1;
        Neumaier s;
        s.add(1);
        for (int j = 1; j < 100; ++j) {
            term *= q / (j * (j + nu));
            s.add(term);
            if (std::fabs(term) < 1e-18) break;
        }
        return s.value();
    }
    const double j = boost::math::cyl_bessel_j(nu, x);
    if (nu <= 150) return std::tgamma(nu + 1) * j / std::pow(x / 2, nu);
    return std::copysign(std::exp(std::lgamma(nu + 1) + std::log(std::fabs(j)) - nu * std::log(x / 2)), j);
}

double bessel_phi(int nu, double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel_phi: non-finite argument");
    x = std::fabs(x);
    if (x <= kSeriesCut) {
        const double q = -x * x / 4;
        const int j0 = std::max(0, -nu);
        double term = 1;
        for (int j = 1; j <= j0; ++j) term *= q / j;
        term /= std::tgamma(j0 + nu + 1.0);
        Neumaier s;
        s.add(term);
        for (int j = j0 + 1; j < j0 + 100; ++j) {
            term *= q / (j * double(j + nu));
            s.add(term);
            if (std::fabs(term) < 1e-18 * std::fabs(s.value()) || term == 0) break;
        }
        return s.value();
    }
    if (nu >= 0) return boost::math::cyl_bessel_j(nu, x) / std::pow(x / 2, nu);
    const double j = boost::math::cyl_bessel_j(-nu, x) * std::pow(x / 2, -nu);
    return (-nu) % 2 ? -j : j;
}

double determinant(DMatrix a) {
    const int n = static_cast<int>(a.size());
    double det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (a[piv][c] == 0) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int j = c; j < n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

double pfaffian(DMatrix a) {
    const int n = static_cast<int>(a.size());
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("pfaffian: matrix not square");
    if (n % 2) throw std::invalid_argument("pfaffian: odd dimension");
    double scale = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a[i][j]));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::fabs(a[i][j] + a[j][i]) > 1e-12 * std::max(scale, 1.0))
                throw std::invalid_argument("pfaffian: matrix not antisymmetric");
    if (n == 0) return 1;
    double pf = 1;
    // Householder tridiagonalization; each reflection has determinant -1.
    for (int i = 0; i < n - 2; ++i) {
        const int len = n - i - 1;
        std::vector<double> v(len);
        double sigma = 0;
        for (int t = 0; t < len; ++t) v[t] = a[i + 1 + t][i];
        for (int t = 1; t < len; ++t) sigma += v[t] * v[t];
        double alpha;
        if (sigma == 0) {
            alpha = v[0];
        } else {
            const double norm_x = std::sqrt(v[0] * v[0] + sigma);
            if (v[0] <= 0) {
                v[0] -= norm_x;
                alpha = norm_x;
            } else {
                v[0] += norm_x;
                alpha = -norm_x;
            }
            double nv = 0;
            for (double x : v) nv += x * x;
            nv = std::sqrt(nv);
            for (double& x : v) x /= nv;
            // w = 2 A' v on the trailing block, then A' += v w^T - w v^T
            std::vector<double> w(len, 0.0);
            for (int r = 0; r < len; ++r)
                for (int c = 0; c < len; ++c) w[r] += a[i + 1 + r][i + 1 + c] * v[c];
            for (double& x : w) x *= 2;
            for (int r = 0; r < len; ++r)
                for (int c = 0; c < len; ++c) a[i + 1 + r][i + 1 + c] += v[r] * w[c] - w[r] * v[c];
            pf = -pf;
        }
        a[i + 1][i] = alpha;
        a[i][i + 1] = -alpha;
        for (int t = i + 2; t < n; ++t) a[t][i] = a[i][t] = 0;
        if (i % 2 == 0) pf *= -alpha;
    }
    return pf * a[n - 2][n - 1];
}

KernelValue psi_hat_beta2(int n, int m, std::span<const double> lambdas) {
    const int k = n - m;
    if (m < 0) throw std::invalid_argument("psi_hat_beta2: m < 0");
    check_lambdas(lambdas, k);
    if (k == 1) return {bessel_psi(n - 1, lambdas[0]), KernelMethod::Bessel, 0};
    std::vector<double> X;
    for (double l : lambdas) X.push_back(l * l);
    DMatrix a(k, std::vector<double>(k));
    for (int r = 0; r < k; ++r)
        for (int b = 0; b < k; ++b) a[r][b] = std::pow(X[r], k - 1 - b) * bessel_psi(n - 1 - b, lambdas[r]);
    return {determinant(std::move(a)) / vandermonde(X), KernelMethod::DetBeta2, 0};
}

double psi_hat_beta2_gram(int n, int m, std::span<const double> lambdas) {
    const int k = n - m;
    if (m < 0) throw std::invalid_argument("psi_hat_beta2_gram: m < 0");
    check_lambdas(lambdas, k);
    DMatrix num(k, std::vector<double>(k)), den(k, std::vector<double>(k));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            Neumaier sn, sd;
            for (double l : lambdas) {
                const double p = std::pow(l * l, a + b);
                sn.add(p * bessel_psi(m + b, l));
                sd.add(p);
            }
            num[a][b] = sn.value();
            den[a][b] = sd.value();
        }
    return determinant(std::move(num)) / determinant(std::move(den));
}

Rational psi_tilde4_bracket_constant(int m) {
    if (m < 0) throw std::invalid_argument("psi_tilde4: m < 0");
    return pair_table(m).bracket_constant;
}

double psi_tilde4_pair(int m, double la, double lb) {
    if (m < 0) throw std::invalid_argument("psi_tilde4: m < 0");
    const double two[2] = {la, lb};
    check_lambdas(two, 2);
    const PairTable& t = pair_table(m);
    const double X = la * la, Y = lb * lb;
    const double big = std::max(X, Y);
    const double gap = std::fabs(X - Y) / big;
    if (big <= 100 && (std::max(la, lb) <= kRaySeriesCut || gap < 0.25)) {
        Neumaier s;
        std::vector<double> py(kPairDegree + 1, 1.0);
        for (int d = 1; d <= kPairDegree; ++d) py[d] = py[d - 1] * Y;
        for (int d = 0; d <= kPairDegree; ++d) {
            double xp = 1;
            for (int i = 0; i <= d; ++i) {
                s.add(t.fl[d][i] * xp * py[d - i]);
                xp *= X;
            }
        }
        return s.value();
    }
    const double a1 = bessel_phi(2 * m - 1, la), a2 = bessel_phi(2 * m, la), a3 = bessel_phi(2 * m + 1, la);
    const double b1 = bessel_phi(2 * m - 1, lb), b2 = bessel_phi(2 * m, lb), b3 = bessel_phi(2 * m + 1, lb);
    const double D = X - Y;
    const double N = a1 * b3 - 2 * a2 * b2 + a3 * b1;
    const double M = a1 * b2 - a2 * b1;
    return (N / (D * D) - 8 * M / (D * D * D)) / to_double(t.bracket_constant);
}

Rational beta4_pinned_constant_at(int k, int m, const std::vector<Rational>& X) {
    if (k < 1 || m < 0) throw std::invalid_argument("beta4_pinned_constant: bad (k, m)");
    if (static_cast<int>(X.size()) != k) throw std::invalid_argument("beta4_pinned_constant: need k nodes");
    const int D0 = k * (k - 1) / 2;
    const PairTable& t = pair_table(m);
    const bool odd = k % 2;
    const int off = odd ? 1 : 0;
    const int dim = k + off;
    std::vector<std::vector<Series<Rational>>> A(dim, std::vector<Series<Rational>>(dim, Series<Rational>(D0 + 1)));
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            for (int d = 0; d + 1 <= D0; ++d) {
                Rational acc = 0;
                for (int i = 0; i <= d; ++i) {
                    Rational xa = 1, xb = 1;
                    for (int j = 0; j < i; ++j) xa *= X[a];
                    for (int j = 0; j < d - i; ++j) xb *= X[b];
                    acc += t.exact[d][i] * xa * xb;
                }
                A[a + off][b + off][d + 1] = (X[a] - X[b]) * acc;
                A[b + off][a + off][d + 1] = -A[a + off][b + off][d + 1];
            }
    if (odd)
        for (int b = 0; b < k; ++b) {
            Rational xp = 1;
            for (int d = 0; d <= D0; ++d) {
                A[0][b + 1][d] = psi_coef_exact(2 * m + 1, d) * xp;
                A[b + 1][0][d] = -A[0][b + 1][d];
                xp *= X[b];
            }
        }
    const auto N = series_pfaffian(A, D0);
    if (N[D0] == 0) throw std::logic_error("beta4_pinned_constant: vanishing leading coefficient");
    return vandermonde(X) / N[D0];
}

Rational beta4_pinned_constant(int k, int m) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, Rational> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find({k, m}); it != cache.end()) return it->second;
    }
    std::vector<Rational> X;
    for (int a = 0; a < k; ++a) X.emplace_back(a + 1);
    Rational c = beta4_pinned_constant_at(k, m, X);
    std::lock_guard lock(mu);
    cache.emplace(std::pair{k, m}, c);
    return c;
}

double beta4_gamma_chain_constant(int k, int m) {
    if (k < 1 || m < 0) throw std::invalid_argument("beta4_gamma_chain_constant: bad (k, m)");
    const double root = 0.5 * (std::lgamma(2 * m + 3.0) + std::lgamma(2 * m + 1.0));
    double lg = 0;
    if (k % 2 == 0) {
        for (int j = 1; j <= k; ++j) lg += (-2.0 * j - 1) * std::log(2.0) + std::lgamma(2.0 * j + 2 * m - 1) - root;
        lg += (k * (k - 1) / 2.0 - k / 2.0) * std::log(16.0);
    } else {
        for (int j = 1; j <= k - 1; ++j) lg += (-2.0 * j + 1) * std::log(2.0) + std::lgamma(2.0 * j + 2 * m + 1) - root;
        lg += (k * (k - 1) / 2.0 - (k - 1) / 2.0) * std::log(16.0);
    }
    return std::exp(lg);
}

std::vector<double> kernel_ray_series(int beta, int n, int m, std::span<const double> lambdas, int order) {
    const int k = n - m;
    if (m < 0) throw std::invalid_argument("kernel_ray_series: m < 0");
    check_lambdas(lambdas, k);
    if (order < 0) throw std::invalid_argument("kernel_ray_series: negative order");
    const int D0 = k * (k - 1) / 2;
    const int S = D0 + order;
    std::vector<double> X;
    for (double l : lambdas) X.push_back(l * l);
    Series<double> N;
    double C = 1;
    if (beta == 2) {
        std::vector<std::vector<Series<double>>> A(k, std::vector<Series<double>>(k, Series<double>(S + 1, 0.0)));
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                const int e = k - 1 - b;
                const auto c = psi_coefs(n - 1 - b, S);
                double xp = std::pow(X[a], e);
                for (int j = 0; e + j <= S; ++j) {
                    A[a][b][e + j] = c[j] * xp;
                    xp *= X[a];
                }
            }
        N = series_determinant(A, S);
    } else if (beta == 4) {
        auto A = beta4_ray_matrix(k, m, X, S);
        N = series_pfaffian(A, S);
        C = to_double(beta4_pinned_constant(k, m));
    } else {
        throw std::invalid_argument("kernel_ray_series: beta must be 2 or 4");
    }
    const double v = vandermonde(X);
    std::vector<double> out(order + 1);
    for (int d = 0; d <= order; ++d) out[d] = C * N[D0 + d] / v;
    return out;
}

KernelValue psi_hat_beta4(int n, int m, std::span<const double> lambdas) {
    const int k = n - m;
    if (m < 0) throw std::invalid_argument("psi_hat_beta4: m < 0");
    check_lambdas(lambdas, k);
    if (k == 1) return {bessel_psi(2 * n - 1, lambdas[0]), KernelMethod::Bessel, 0};
    const KernelMethod method = k % 2 ? KernelMethod::PfaffianBeta4Odd : KernelMethod::PfaffianBeta4Even;
    if (*std::max_element(lambdas.begin(), lambdas.end()) <= kRaySeriesCut) {
        Neumaier s;
        for (double c : kernel_ray_series(4, n, m, lambdas, kRayOrder)) s.add(c);
        return {s.value(), method, 0};
    }
    const bool odd = k % 2;
    const int off = odd ? 1 : 0;
    DMatrix A(k + off, std::vector<double>(k + off, 0.0));
    std::vector<double> X;
    for (double l : lambdas) X.push_back(l * l);
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            const double v = (X[a] - X[b]) * psi_tilde4_pair(m, lambdas[a], lambdas[b]);
            A[a + off][b + off] = v;
            A[b + off][a + off] = -v;
        }
    if (odd)
        for (int b = 0; b < k; ++b) {
            A[0][b + 1] = bessel_psi(2 * m + 1, lambdas[b]);
            A[b + 1][0] = -A[0][b + 1];
        }
    const double C = to_double(beta4_pinned_constant(k, m));
    return {C * pfaffian(std::move(A)) / vandermonde(X), method, 0};
}

MomentCheck kernel_moment_check(const StiefelSpec& spec, std::span<const double> lambdas, int D, Engine e) {
    if (spec.beta != 2 && spec.beta != 4) throw std::invalid_argument("kernel_moment_check: beta must be 2 or 4");
    if (D < 0 || D % 2 || D > 12) throw std::invalid_argument("kernel_moment_check: D must be even and <= 12");
    const int k = spec.k;
    check_lambdas(lambdas, k);
    const auto& l = spec.layout;
    MomentCheck out;
    bool odd_zero = true;
    std::map<std::vector<int>, double> cache;
    auto moment = [&](const std::vector<int>& alpha) {
        auto it = cache.find(alpha);
        if (it != cache.end()) return it->second;
        std::vector<Monomial::Entry> ent;
        for (int c = 0; c < k; ++c)
            if (alpha[c]) ent.emplace_back(static_cast<std::uint32_t>(l.index(c, 0, c)), alpha[c]);
        GaussRational v = integrate(e, spec, Polynomial::monomial(l, Monomial(ent)));
        const double d = to_double(v.re);
        cache.emplace(alpha, d);
        return d;
    };
    // E[l^deg] summed over compositions alpha of deg with multinomial weights.
    auto power_moment = [&](int deg) {
        Neumaier s;
        std::vector<int> alpha(k, 0);
        std::function<void(int, int)> rec = [&](int c, int left) {
            if (c == k - 1) {
                alpha[c] = left;
                double w = std::tgamma(deg + 1.0);
                for (int t = 0; t < k; ++t) w *= std::pow(lambdas[t], alpha[t]) / std::tgamma(alpha[t] + 1.0);
                const double mu = moment(alpha);
                if (deg % 2 && mu != 0) odd_zero = false;
                s.add(w * mu);
                return;
            }
            for (int a = 0; a <= left; ++a) {
                alpha[c] = a;
                rec(c + 1, left - a);
            }
        };
        rec(0, deg);
        return s.value();
    };
    const auto kappa = kernel_ray_series(spec.beta, spec.n, spec.m(), lambdas, D / 2);
    Neumaier series;
    for (int deg = 0; deg <= D; ++deg) {
        const double mu = power_moment(deg);
        if (deg % 2) continue;
        const int d = deg / 2;
        const double term = (d % 2 ? -1.0 : 1.0) * mu / std::tgamma(deg + 1.0);
        series.add(term);
        out.rows.push_back({deg, term, kappa[d]});
    }
    out.series_value = series.value();
    out.kernel_value = spec.beta == 2 ? psi_hat_beta2(spec.n, spec.m(), lambdas).value
                                      : psi_hat_beta4(spec.n, spec.m(), lambdas).value;
    double s = 0;
    for (double x : lambdas) s += x;
    out.tail_bound = std::pow(s, D + 2) / std::tgamma(D + 3.0);
    out.passed = odd_zero && std::fabs(out.series_value - out.kernel_value) <= out.tail_bound + 1e-12;
    return out;
}

}  // namespace haarint
