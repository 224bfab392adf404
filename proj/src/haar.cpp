#include "haarint/haar.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace haarint {

namespace {

using cd = std::complex<double>;

// Gram-Schmidt over R, C (one column per vector) or H (two complex columns
// per vector in block form). Two passes keep the residual at rounding level.
bool orthonormalize(CMatrix& a, int width) {
    const std::size_t rows = a.size();
    const int cols = static_cast<int>(a[0].size());
    for (int j = 0; j < cols; j += width) {
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < j; i += width) {
                cd r[2][2];
                for (int p = 0; p < width; ++p)
                    for (int q = 0; q < width; ++q) {
                        cd s = 0;
                        for (std::size_t t = 0; t < rows; ++t) s += std::conj(a[t][i + p]) * a[t][j + q];
                        r[p][q] = s;
                    }
                for (std::size_t t = 0; t < rows; ++t) {
                    cd upd[2] = {0, 0};
                    for (int q = 0; q < width; ++q)
                        for (int p = 0; p < width; ++p) upd[q] += a[t][i + p] * r[p][q];
                    for (int q = 0; q < width; ++q) a[t][j + q] -= upd[q];
                }
            }
        double nrm = 0;
        for (std::size_t t = 0; t < rows; ++t) nrm += std::norm(a[t][j]);
        if (nrm < 1e-20) return false;
        nrm = std::sqrt(nrm);
        for (std::size_t t = 0; t < rows; ++t)
            for (int q = 0; q < width; ++q) a[t][j + q] /= nrm;
    }
    return true;
}

struct Welford {
    double n = 0, mean = 0, m2 = 0;
    void add(double x) {
        n += 1;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    static Welford merge(const Welford& a, const Welford& b) {
        if (a.n == 0) return b;
        if (b.n == 0) return a;
        Welford r;
        r.n = a.n + b.n;
        const double d = b.mean - a.mean;
        r.mean = a.mean + d * (b.n / r.n);
        r.m2 = a.m2 + b.m2 + d * d * (a.n * b.n / r.n);
        return r;
    }
};

// Fixed-shape pairwise reduction over blocks.
Welford reduce(std::vector<Welford> v) {
    if (v.empty()) return {};
    while (v.size() > 1) {
        std::vector<Welford> next;
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(Welford::merge(v[i], v[i + 1]));
        if (v.size() % 2) next.push_back(v.back());
        v = std::move(next);
    }
    return v[0];
}

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    return std::mt19937_64(seq);
}

// Runs body(block, count, rng) for every block on a small thread pool.
template <class Body>
void for_blocks(std::uint64_t samples, int threads, Body&& body) {
    const std::uint64_t nblocks = (samples + kBlockSize - 1) / kBlockSize;
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t b; (b = next.fetch_add(1)) < nblocks;) {
            const std::uint64_t count = std::min<std::uint64_t>(kBlockSize, samples - b * kBlockSize);
            body(b, count);
        }
    };
    const int t = static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), nblocks));
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (int i = 1; i < t; ++i)
        pool.emplace_back([&] {
            try {
                worker();
            } catch (...) {
                std::lock_guard lock(mu);
                err = std::current_exception();
            }
        });
    try {
        worker();
    } catch (...) {
        std::lock_guard lock(mu);
        err = std::current_exception();
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

McEstimate finish(const Welford& w, std::uint64_t seed) {
    McEstimate e;
    e.mean = w.mean;
    e.samples = static_cast<std::uint64_t>(w.n);
    e.seed = seed;
    e.std_error = w.n > 1 ? std::sqrt(w.m2 / (w.n - 1) / w.n) : 0.0;
    return e;
}

void check_samples(std::uint64_t samples) {
    if (samples < 100) throw std::invalid_argument("mc_integrate: need at least 100 samples");
}

}  // namespace

HaarSample sample_stiefel(const StiefelSpec& spec, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const int n = spec.n, k = spec.k;
    const bool quat = spec.beta == 4;
    const int rows = quat ? 2 * n : n, cols = quat ? 2 * k : k;
    CMatrix a(rows, std::vector<cd>(cols));
    do {
        for (int c = 0; c < k; ++c)
            for (int r = 0; r < n; ++r) {
                if (spec.beta == 1) {
                    a[r][c] = g(rng);
                } else if (spec.beta == 2) {
                    const double re = g(rng);
                    a[r][c] = cd(re, g(rng));
                } else {
                    const double qa = g(rng), qb = g(rng), qc = g(rng), qd = g(rng);
                    const cd z(qa, qb), w(qc, qd);
                    a[2 * r][2 * c] = z;
                    a[2 * r][2 * c + 1] = w;
                    a[2 * r + 1][2 * c] = -std::conj(w);
                    a[2 * r + 1][2 * c + 1] = std::conj(z);
                }
            }
    } while (!orthonormalize(a, quat ? 2 : 1));
    HaarSample s{spec, std::vector<double>(spec.layout.dim()), {}};
    const auto& l = spec.layout;
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < n; ++r) {
            if (spec.beta == 1) {
                s.x[l.index(c, 0, r)] = a[r][c].real();
            } else if (spec.beta == 2) {
                s.x[l.index(c, 0, r)] = a[r][c].real();
                s.x[l.index(c, 1, r)] = a[r][c].imag();
            } else {
                const cd z = a[2 * r][2 * c], w = a[2 * r][2 * c + 1];
                s.x[l.index(c, 0, r)] = z.real();
                s.x[l.index(c, 1, r)] = z.imag();
                s.x[l.index(c, 2, r)] = w.real();
                s.x[l.index(c, 3, r)] = w.imag();
            }
        }
    s.raw = std::move(a);
    return s;
}

CMatrix complex_form(const HaarSample& s) {
    if (!s.raw.empty()) return s.raw;
    const auto& sp = s.spec;
    const auto& l = sp.layout;
    const int n = sp.n, k = sp.k;
    if (sp.beta != 4) {
        CMatrix a(n, std::vector<cd>(k));
        for (int c = 0; c < k; ++c)
            for (int r = 0; r < n; ++r)
                a[r][c] = cd(s.x[l.index(c, 0, r)], sp.beta == 2 ? s.x[l.index(c, 1, r)] : 0.0);
        return a;
    }
    CMatrix a(2 * n, std::vector<cd>(2 * k));
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < n; ++r) {
            const cd z(s.x[l.index(c, 0, r)], s.x[l.index(c, 1, r)]);
            const cd w(s.x[l.index(c, 2, r)], s.x[l.index(c, 3, r)]);
            a[2 * r][2 * c] = z;
            a[2 * r][2 * c + 1] = w;
            a[2 * r + 1][2 * c] = -std::conj(w);
            a[2 * r + 1][2 * c + 1] = std::conj(z);
        }
    return a;
}

double orthonormality_residual(const HaarSample& s) {
    const CMatrix a = complex_form(s);
    const std::size_t rows = a.size(), cols = a[0].size();
    double worst = 0;
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            cd v = 0;
            for (std::size_t t = 0; t < rows; ++t) v += std::conj(a[t][i]) * a[t][j];
            worst = std::max(worst, std::abs(v - cd(i == j ? 1.0 : 0.0)));
        }
    return worst;
}

double structure_residual(const HaarSample& s) {
    if (s.spec.beta != 4) return 0;
    const CMatrix a = complex_form(s);
    // (tau A tau^T) on 2x2 blocks maps [[z, w], [u, v]] to [[v, -u], [-w, z]].
    double worst = 0;
    for (std::size_t r = 0; r < a.size(); r += 2)
        for (std::size_t c = 0; c < a[0].size(); c += 2) {
            const cd z = a[r][c], w = a[r][c + 1], u = a[r + 1][c], v = a[r + 1][c + 1];
            worst = std::max({worst, std::abs(std::conj(z) - v), std::abs(std::conj(w) + u),
                              std::abs(std::conj(u) + w), std::abs(std::conj(v) - z)});
        }
    return worst;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HAARINT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<McEstimate> mc_integrate_many(const StiefelSpec& spec, const std::vector<Polynomial>& fs,
                                          std::uint64_t samples, std::uint64_t seed, int threads, SimdPath path) {
    check_samples(samples);
    std::vector<CompiledPoly> compiled;
    for (const auto& f : fs) {
        if (!(f.layout() == spec.layout)) throw std::invalid_argument("mc_integrate: polynomial layout mismatch");
        compiled.push_back(compile(f));
    }
    const std::size_t dim = spec.layout.dim();
    const std::uint64_t nblocks = (samples + kBlockSize - 1) / kBlockSize;
    std::vector<std::vector<Welford>> acc(fs.size(), std::vector<Welford>(nblocks));
    for_blocks(samples, threads, [&](std::uint64_t b, std::uint64_t count) {
        auto rng = block_rng(seed, b);
        std::vector<double> soa(dim * count);
        for (std::uint64_t i = 0; i < count; ++i) {
            const HaarSample s = sample_stiefel(spec, rng);
            for (std::size_t v = 0; v < dim; ++v) soa[v * count + i] = s.x[v];
        }
        std::vector<double> vals(count);
        for (std::size_t p = 0; p < compiled.size(); ++p) {
            eval_batch(compiled[p], soa.data(), count, count, vals.data(), path);
            Welford w;
            for (double v : vals) w.add(v);
            acc[p][b] = w;
        }
    });
    std::vector<McEstimate> out;
    for (auto& a : acc) out.push_back(finish(reduce(std::move(a)), seed));
    return out;
}

McEstimate mc_integrate(const StiefelSpec& spec, const Polynomial& f, std::uint64_t samples, std::uint64_t seed,
                        int threads) {
    return mc_integrate_many(spec, {f}, samples, seed, threads)[0];
}

McEstimate mc_integrate(const StiefelSpec& spec, const std::function<double(std::span<const double>)>& f,
                        std::uint64_t samples, std::uint64_t seed, int threads) {
    check_samples(samples);
    const std::uint64_t nblocks = (samples + kBlockSize - 1) / kBlockSize;
    std::vector<Welford> acc(nblocks);
    for_blocks(samples, threads, [&](std::uint64_t b, std::uint64_t count) {
        auto rng = block_rng(seed, b);
        Welford w;
        for (std::uint64_t i = 0; i < count; ++i) w.add(f(sample_stiefel(spec, rng).x));
        acc[b] = w;
    });
    return finish(reduce(std::move(acc)), seed);
}

Rational sphere_monomial_moment(int N, std::span<const int> exponents) {
    if (N < 1) throw std::invalid_argument("sphere_monomial_moment: N >= 1 required");
    if (static_cast<int>(exponents.size()) > N) throw std::invalid_argument("sphere_monomial_moment: too many exponents");
    // Gamma((a+1)/2) / Gamma(1/2) = (a-1)!! / 2^(a/2) for even a, and
    // Gamma(N/2 + h) / Gamma(N/2) = (N/2)_h.
    Rational num = 1;
    int half = 0;
    for (int a : exponents) {
        if (a < 0) throw std::invalid_argument("sphere_monomial_moment: negative exponent");
        if (a % 2) return 0;
        for (int t = a - 1; t > 1; t -= 2) num *= t;
        num /= Rational(mpz_class(1) << (a / 2));
        half += a / 2;
    }
    return num / rising(frac(N, 2), half);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    x.assign(n, 0);
    w.assign(n, 0);
    const unsigned un = static_cast<unsigned>(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            const double p = std::legendre(un, z);
            dp = n * (z * p - (n > 1 ? std::legendre(un - 1, z) : 1.0)) / (z * z - 1);
            const double dz = p / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        const double p = std::legendre(un, z);
        dp = n * (z * p - (n > 1 ? std::legendre(un - 1, z) : 1.0)) / (z * z - 1);
        x[i] = z;
        w[i] = 2 / ((1 - z * z) * dp * dp);
    }
}

double low_dim_quadrature(const StiefelSpec& spec, const Polynomial& f, int nodes) {
    if (!(f.layout() == spec.layout)) throw std::invalid_argument("low_dim_quadrature: layout mismatch");
    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);
    const double pi = std::numbers::pi;
    const CompiledPoly cp = compile(f);
    std::vector<double> pts, wts;
    const std::size_t dim = spec.layout.dim();
    auto push = [&](const std::vector<double>& p, double wt) {
        pts.insert(pts.end(), p.begin(), p.end());
        wts.push_back(wt);
    };
    if (spec.beta == 1 && spec.n == 2 && spec.k == 2) {
        for (int i = 0; i < nodes; ++i) {
            const double t = pi * (gx[i] + 1);
            push({std::cos(t), std::sin(t), -std::sin(t), std::cos(t)}, gw[i] / 2);
        }
    } else if (spec.beta == 2 && spec.n == 1 && spec.k == 1) {
        for (int i = 0; i < nodes; ++i) {
            const double t = pi * (gx[i] + 1);
            push({std::cos(t), std::sin(t)}, gw[i] / 2);
        }
    } else if (spec.beta == 1 && spec.n == 3) {
        // R = Rz(a) Ry(b) Rz(c), measure sin b da db dc / (8 pi^2)
        for (int i = 0; i < nodes; ++i)
            for (int j = 0; j < nodes; ++j)
                for (int q = 0; q < nodes; ++q) {
                    const double a = pi * (gx[i] + 1), b = pi * (gx[j] + 1) / 2, c = pi * (gx[q] + 1);
                    const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
                    const double cc = std::cos(c), sc = std::sin(c);
                    const double R[3][3] = {{ca * cb * cc - sa * sc, -ca * cb * sc - sa * cc, ca * sb},
                                            {sa * cb * cc + ca * sc, -sa * cb * sc + ca * cc, sa * sb},
                                            {-sb * cc, sb * sc, cb}};
                    std::vector<double> p(dim);
                    for (int col = 0; col < spec.k; ++col)
                        for (int r = 0; r < 3; ++r) p[spec.layout.index(col, 0, r)] = R[r][col];
                    // Jacobians pi, pi/2, pi against the 1 / (8 pi^2) normalization.
                    push(p, gw[i] * gw[j] * gw[q] * sb * pi * (pi / 2) * pi / (8 * pi * pi));
                }
    } else {
        throw std::invalid_argument("low_dim_quadrature: unsupported spec");
    }
    const std::size_t npts = wts.size();
    std::vector<double> soa(dim * npts);
    for (std::size_t i = 0; i < npts; ++i)
        for (std::size_t v = 0; v < dim; ++v) soa[v * npts + i] = pts[i * dim + v];
    std::vector<double> vals(npts);
    eval_batch(cp, soa.data(), npts, npts, vals.data(), SimdPath::Scalar);
    double sum = 0, comp = 0;
    for (std::size_t i = 0; i < npts; ++i) {
        const double term = wts[i] * vals[i];
        const double s = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - s) + term : (term - s) + sum;
        sum = s;
    }
    return sum + comp;
}

}  // namespace haarint
