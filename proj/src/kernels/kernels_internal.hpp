#pragma once

#include "phasespace/kernels.hpp"

namespace phasespace::kernels::detail {

// Textbook product; std::complex operator* adds NaN recovery that the SIMD
// path does not reproduce.
inline Complex mul(Complex a, Complex b) {
  const double re = a.real() * b.real() - a.imag() * b.imag();
  const double im = a.real() * b.imag() + a.imag() * b.real();
  return {re, im};
}

inline double norm_sq(Complex a) {
  return a.real() * a.real() + a.imag() * a.imag();
}

#ifdef PHASESPACE_BUILD_AVX2
const KernelTable& avx2_table();
#endif

}  // namespace phasespace::kernels::detail
