// Built with -mavx2 and without FMA so that every lane rounds exactly like
// the scalar loop.
#include "haarint/batch_eval.hpp"

#include <immintrin.h>

namespace haarint::detail {

void eval_batch_avx2(const CompiledPoly& p, const double* soa, std::size_t stride, std::size_t npoints,
                     double* out) {
    const std::size_t nterms = p.coef.size();
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    std::size_t i = 0;
    for (; i + 4 <= npoints; i += 4) {
        __m256d sum = _mm256_setzero_pd();
        __m256d comp = _mm256_setzero_pd();
        for (std::size_t t = 0; t < nterms; ++t) {
            __m256d term = _mm256_set1_pd(p.coef[t]);
            for (std::uint32_t f = p.offsets[t]; f < p.offsets[t + 1]; ++f) {
                const __m256d x = _mm256_loadu_pd(soa + p.vars[f] * stride + i);
                __m256d pw = x;
                for (std::uint32_t e = 1; e < p.exps[f]; ++e) pw = _mm256_mul_pd(pw, x);
                term = _mm256_mul_pd(term, pw);
            }
            const __m256d s = _mm256_add_pd(sum, term);
            const __m256d big = _mm256_cmp_pd(_mm256_and_pd(sum, absmask), _mm256_and_pd(term, absmask), _CMP_GE_OQ);
            const __m256d a = _mm256_add_pd(_mm256_sub_pd(sum, s), term);
            const __m256d b = _mm256_add_pd(_mm256_sub_pd(term, s), sum);
            comp = _mm256_add_pd(comp, _mm256_blendv_pd(b, a, big));
            sum = s;
        }
        _mm256_storeu_pd(out + i, _mm256_add_pd(sum, comp));
    }
    if (i < npoints) eval_batch_scalar(p, soa, stride, i, npoints, out);
}

}  // namespace haarint::detail
