#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace phasespace::kernels {
namespace {

using detail::mul;
using detail::norm_sq;

inline const double* dptr(const Complex* z) {
  return reinterpret_cast<const double*>(z);
}
inline double* dptr(Complex* z) { return reinterpret_cast<double*>(z); }

// [ar, ai, br, bi] * broadcast(c) in the textbook form, two complex lanes.
inline __m256d cmul2(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);          // br0 br0 br1 br1
  const __m256d b_im = _mm256_permute_pd(b, 0b1111);  // bi0 bi0 bi1 bi1
  const __m256d a_sw = _mm256_permute_pd(a, 0b0101);  // ai0 ar0 ai1 ar1
  // re = ar*br - ai*bi ; im = ai*br + ar*bi
  return _mm256_addsub_pd(_mm256_mul_pd(a, b_re), _mm256_mul_pd(a_sw, b_im));
}

void euler_update(std::span<const Complex> x, std::span<const Complex> a,
                  std::span<const Complex> b, double dt, std::span<Complex> out) {
  const std::size_t n = x.size() * 2;
  const double *px = dptr(x.data()), *pa = dptr(a.data()), *pb = dptr(b.data());
  double* po = dptr(out.data());
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_add_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
    _mm256_storeu_pd(po + i, _mm256_add_pd(_mm256_loadu_pd(px + i), _mm256_mul_pd(vdt, s)));
  }
  for (; i < n; ++i) po[i] = px[i] + dt * (pa[i] + pb[i]);
}

void midpoint(std::span<const Complex> x, std::span<const Complex> y,
              std::span<Complex> out) {
  const std::size_t n = x.size() * 2;
  const double *px = dptr(x.data()), *py = dptr(y.data());
  double* po = dptr(out.data());
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(po + i, _mm256_mul_pd(half, _mm256_add_pd(_mm256_loadu_pd(px + i),
                                                               _mm256_loadu_pd(py + i))));
  }
  for (; i < n; ++i) po[i] = 0.5 * (px[i] + py[i]);
}

void multiply(std::span<const Complex> a, std::span<const Complex> b,
              std::span<Complex> out) {
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(dptr(a.data() + i));
    const __m256d vb = _mm256_loadu_pd(dptr(b.data() + i));
    _mm256_storeu_pd(dptr(out.data() + i), cmul2(va, vb));
  }
  for (; i < n; ++i) out[i] = mul(a[i], b[i]);
}

void matmul(std::size_t n, const Complex* a, const Complex* b, Complex* c) {
  // Up to eight output columns stay in registers while k runs; each element
  // still sums its products in ascending k from zero.
  for (std::size_t i = 0; i < n; ++i) {
    Complex* row = c + i * n;
    const Complex* arow = a + i * n;
    std::size_t j0 = 0;
    for (; j0 + 8 <= n; j0 += 8) {
      __m256d acc0 = _mm256_setzero_pd(), acc1 = acc0, acc2 = acc0, acc3 = acc0;
      for (std::size_t k = 0; k < n; ++k) {
        const __m256d va = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(arow + k));
        const double* bp = dptr(b + k * n + j0);
        acc0 = _mm256_add_pd(acc0, cmul2(va, _mm256_loadu_pd(bp)));
        acc1 = _mm256_add_pd(acc1, cmul2(va, _mm256_loadu_pd(bp + 4)));
        acc2 = _mm256_add_pd(acc2, cmul2(va, _mm256_loadu_pd(bp + 8)));
        acc3 = _mm256_add_pd(acc3, cmul2(va, _mm256_loadu_pd(bp + 12)));
      }
      _mm256_storeu_pd(dptr(row + j0), acc0);
      _mm256_storeu_pd(dptr(row + j0 + 2), acc1);
      _mm256_storeu_pd(dptr(row + j0 + 4), acc2);
      _mm256_storeu_pd(dptr(row + j0 + 6), acc3);
    }
    for (; j0 + 2 <= n; j0 += 2) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t k = 0; k < n; ++k) {
        const __m256d va = _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(arow + k));
        acc = _mm256_add_pd(acc, cmul2(va, _mm256_loadu_pd(dptr(b + k * n + j0))));
      }
      _mm256_storeu_pd(dptr(row + j0), acc);
    }
    if (j0 < n) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Complex p = mul(arow[k], b[k * n + j0]);
        acc = {acc.real() + p.real(), acc.imag() + p.imag()};
      }
      row[j0] = acc;
    }
  }
}

void matmul_real(std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < n; ++i) {
    double* row = c + i * n;
    const double* arow = a + i * n;
    std::size_t j0 = 0;
    for (; j0 + 8 <= n; j0 += 8) {
      __m256d acc0 = _mm256_setzero_pd(), acc1 = acc0;
      for (std::size_t k = 0; k < n; ++k) {
        const __m256d va = _mm256_broadcast_sd(arow + k);
        const double* bp = b + k * n + j0;
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(va, _mm256_loadu_pd(bp)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(va, _mm256_loadu_pd(bp + 4)));
      }
      _mm256_storeu_pd(row + j0, acc0);
      _mm256_storeu_pd(row + j0 + 4, acc1);
    }
    for (; j0 + 4 <= n; j0 += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t k = 0; k < n; ++k) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_broadcast_sd(arow + k),
                                               _mm256_loadu_pd(b + k * n + j0)));
      }
      _mm256_storeu_pd(row + j0, acc);
    }
    for (; j0 < n; ++j0) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += arow[k] * b[k * n + j0];
      row[j0] = acc;
    }
  }
}

void matvec(std::size_t rows, std::size_t cols, const Complex* a,
            const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const Complex* arow = a + i * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2) {
      acc = _mm256_add_pd(acc, cmul2(_mm256_loadu_pd(dptr(arow + j)),
                                     _mm256_loadu_pd(dptr(x + j))));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    Complex even{lanes[0], lanes[1]};
    const Complex odd{lanes[2], lanes[3]};
    if (j < cols) {
      const Complex p0 = mul(arow[j], x[j]);
      even = {even.real() + p0.real(), even.imag() + p0.imag()};
    }
    y[i] = {even.real() + odd.real(), even.imag() + odd.imag()};
  }
}

WeightedSums weighted_sums(std::span<const Complex> w,
                           std::span<const Complex> v) {
  __m256d ws = _mm256_setzero_pd();
  __m256d wvs = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= w.size(); i += 2) {
    const __m256d vw = _mm256_loadu_pd(dptr(w.data() + i));
    ws = _mm256_add_pd(ws, vw);
    wvs = _mm256_add_pd(wvs, cmul2(vw, _mm256_loadu_pd(dptr(v.data() + i))));
  }
  alignas(32) double a[4], b[4];
  _mm256_store_pd(a, ws);
  _mm256_store_pd(b, wvs);
  Complex w_even{a[0], a[1]}, wv_even{b[0], b[1]};
  const Complex w_odd{a[2], a[3]}, wv_odd{b[2], b[3]};
  if (i < w.size()) {
    w_even = {w_even.real() + w[i].real(), w_even.imag() + w[i].imag()};
    const Complex p0 = mul(w[i], v[i]);
    wv_even = {wv_even.real() + p0.real(), wv_even.imag() + p0.imag()};
  }
  return {{w_even.real() + w_odd.real(), w_even.imag() + w_odd.imag()},
          {wv_even.real() + wv_odd.real(), wv_even.imag() + wv_odd.imag()}};
}

inline __m256d lane_norms(__m256d z) {
  // [re0^2+im0^2, same, re1^2+im1^2, same]
  const __m256d sq = _mm256_mul_pd(z, z);
  return _mm256_add_pd(sq, _mm256_permute_pd(sq, 0b0101));
}

double reduce_max(__m256d m, __m256d bad, std::span<const Complex> tail_x,
                  std::span<const Complex> tail_y, bool diff) {
  if (_mm256_movemask_pd(bad) != 0) return std::numeric_limits<double>::infinity();
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = lanes[0] > lanes[2] ? lanes[0] : lanes[2];
  for (std::size_t i = 0; i < tail_x.size(); ++i) {
    const Complex z = diff ? Complex{tail_x[i].real() - tail_y[i].real(),
                                     tail_x[i].imag() - tail_y[i].imag()}
                           : tail_x[i];
    const double s = norm_sq(z);
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    if (s > out) out = s;
  }
  return out;
}

double max_norm_sq(std::span<const Complex> x) {
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d m = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    const __m256d s = lane_norms(_mm256_loadu_pd(dptr(x.data() + i)));
    // not (s < inf) catches NaN and overflow to inf
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(s, inf, _CMP_NLT_UQ));
    m = _mm256_max_pd(m, s);
  }
  return reduce_max(m, bad, x.subspan(i), {}, false);
}

double max_diff_sq(std::span<const Complex> x, std::span<const Complex> y) {
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d m = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(dptr(x.data() + i)),
                                    _mm256_loadu_pd(dptr(y.data() + i)));
    const __m256d s = lane_norms(d);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(s, inf, _CMP_NLT_UQ));
    m = _mm256_max_pd(m, s);
  }
  return reduce_max(m, bad, x.subspan(i), y.subspan(i), true);
}

constexpr KernelTable kAvx2{
    "avx2", euler_update, midpoint,      multiply,    matmul,
    matmul_real, matvec, weighted_sums, max_norm_sq, max_diff_sq,
};

}  // namespace

namespace detail {
const KernelTable& avx2_table() { return kAvx2; }
}  // namespace detail

}  // namespace phasespace::kernels
