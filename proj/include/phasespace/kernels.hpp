#pragma once

// Data-parallel complex arithmetic used by the stepping and estimation loops.
//
// Every kernel has a scalar reference and, on x86-64, an AVX2 variant. The
// variants perform the same IEEE operations in the same order (no fused
// multiply-add, lane-blocked reductions mirrored by the scalar code), so the
// results are bit-identical and the dispatch choice never changes a run.

#include <cstddef>
#include <span>
#include <string_view>

#include "phasespace/common.hpp"

namespace phasespace::kernels {

struct WeightedSums {
  Complex weight_sum;
  Complex weighted_value_sum;
};

struct KernelTable {
  std::string_view name;

  /// out[i] = x[i] + dt * (a[i] + b[i])
  void (*euler_update)(std::span<const Complex> x, std::span<const Complex> a,
                       std::span<const Complex> b, double dt,
                       std::span<Complex> out);

  /// out[i] = 0.5 * (x[i] + y[i])
  void (*midpoint)(std::span<const Complex> x, std::span<const Complex> y,
                   std::span<Complex> out);

  /// out[i] = a[i] * b[i]
  void (*multiply)(std::span<const Complex> a, std::span<const Complex> b,
                   std::span<Complex> out);

  /// c = a * b for row-major n x n matrices.
  void (*matmul)(std::size_t n, const Complex* a, const Complex* b,
                 Complex* c);

  /// matmul on real matrices. Summation order matches matmul, so on inputs
  /// with zero imaginary parts the two agree bit for bit.
  void (*matmul_real)(std::size_t n, const double* a, const double* b, double* c);

  /// y = A x for a row-major rows x cols matrix.
  void (*matvec)(std::size_t rows, std::size_t cols, const Complex* a,
                 const Complex* x, Complex* y);

  /// Sum of w and of w * v. Even and odd indices accumulate separately and
  /// are combined at the end.
  WeightedSums (*weighted_sums)(std::span<const Complex> w,
                                std::span<const Complex> v);

  /// max_i |x[i]|^2, or +inf if any entry is not finite.
  double (*max_norm_sq)(std::span<const Complex> x);

  /// max_i |x[i] - y[i]|^2
  double (*max_diff_sq)(std::span<const Complex> x, std::span<const Complex> y);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when not compiled in or not supported by the CPU.
const KernelTable* avx2_kernels();

/// Table selected at first use: AVX2 when available, unless the environment
/// variable PHASESPACE_KERNELS is set to "scalar".
const KernelTable& active();

/// Overrides the process-wide selection. Intended for tests and benchmarks.
void select(const KernelTable& table);

}  // namespace phasespace::kernels
