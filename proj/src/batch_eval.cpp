#include "haarint/batch_eval.hpp"

#include <cmath>
#include <stdexcept>

namespace haarint {

CompiledPoly compile(const Polynomial& p) {
    CompiledPoly c;
    c.nvars = p.layout().dim();
    c.offsets.push_back(0);
    for (const auto& [m, v] : p.terms()) {
        const double re = to_double(v.re);
        if (re == 0) continue;
        c.coef.push_back(re);
        for (const auto& [idx, e] : m.entries()) {
            if (static_cast<int>(idx) >= c.nvars) c.nvars = static_cast<int>(idx) + 1;
            c.vars.push_back(idx);
            c.exps.push_back(e);
        }
        c.offsets.push_back(static_cast<std::uint32_t>(c.vars.size()));
    }
    return c;
}

SimdPath best_simd_path() {
#if defined(__x86_64__) && defined(HAARINT_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2");
    if (ok) return SimdPath::Avx2;
#endif
    return SimdPath::Scalar;
}

std::string simd_path_name(SimdPath p) { return p == SimdPath::Avx2 ? "avx2" : "scalar"; }

namespace detail {

void eval_batch_scalar(const CompiledPoly& p, const double* soa, std::size_t stride, std::size_t begin,
                       std::size_t end, double* out) {
    const std::size_t nterms = p.coef.size();
    for (std::size_t i = begin; i < end; ++i) {
        double sum = 0, comp = 0;
        for (std::size_t t = 0; t < nterms; ++t) {
            double term = p.coef[t];
            for (std::uint32_t f = p.offsets[t]; f < p.offsets[t + 1]; ++f) {
                const double x = soa[p.vars[f] * stride + i];
                double pw = x;
                for (std::uint32_t e = 1; e < p.exps[f]; ++e) pw = pw * x;
                term = term * pw;
            }
            const double s = sum + term;
            if (std::fabs(sum) >= std::fabs(term))
                comp = comp + ((sum - s) + term);
            else
                comp = comp + ((term - s) + sum);
            sum = s;
        }
        out[i] = sum + comp;
    }
}

#if !defined(HAARINT_HAVE_AVX2)
void eval_batch_avx2(const CompiledPoly&, const double*, std::size_t, std::size_t, double*) {
    throw std::runtime_error("eval_batch: built without AVX2 support");
}
#endif

}  // namespace detail

void eval_batch(const CompiledPoly& p, const double* soa, std::size_t stride, std::size_t npoints, double* out,
                SimdPath path) {
    if (path == SimdPath::Avx2)
        detail::eval_batch_avx2(p, soa, stride, npoints, out);
    else
        detail::eval_batch_scalar(p, soa, stride, 0, npoints, out);
}

}  // namespace haarint
