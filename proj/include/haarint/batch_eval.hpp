#pragma once

#include "haarint/algebra.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace haarint {

// Real part of a polynomial flattened for evaluation over many points.
struct CompiledPoly {
    int nvars = 0;
    std::vector<double> coef;
    std::vector<std::uint32_t> offsets;  // term t uses factors [offsets[t], offsets[t+1])
    std::vector<std::uint32_t> vars;
    std::vector<std::uint32_t> exps;
};

CompiledPoly compile(const Polynomial& p);

enum class SimdPath { Scalar, Avx2 };
SimdPath best_simd_path();
std::string simd_path_name(SimdPath p);

// Points are stored structure-of-arrays: coordinate v of point i is soa[v * stride + i].
// Terms are summed in order with Neumaier compensation; both paths give identical bits.
void eval_batch(const CompiledPoly& p, const double* soa, std::size_t stride, std::size_t npoints, double* out,
                SimdPath path);

namespace detail {
void eval_batch_scalar(const CompiledPoly& p, const double* soa, std::size_t stride, std::size_t begin,
                       std::size_t end, double* out);
void eval_batch_avx2(const CompiledPoly& p, const double* soa, std::size_t stride, std::size_t npoints,
                     double* out);
}  // namespace detail

}  // namespace haarint
