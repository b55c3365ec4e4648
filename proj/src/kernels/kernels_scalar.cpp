#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace phasespace::kernels {
namespace {

using detail::mul;
using detail::norm_sq;

void euler_update(std::span<const Complex> x, std::span<const Complex> a,
                  std::span<const Complex> b, double dt, std::span<Complex> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double re = a[i].real() + b[i].real();
    const double im = a[i].imag() + b[i].imag();
    out[i] = {x[i].real() + dt * re, x[i].imag() + dt * im};
  }
}

void midpoint(std::span<const Complex> x, std::span<const Complex> y,
              std::span<Complex> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = {0.5 * (x[i].real() + y[i].real()),
              0.5 * (x[i].imag() + y[i].imag())};
  }
}

void multiply(std::span<const Complex> a, std::span<const Complex> b,
              std::span<Complex> out) {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = mul(a[i], b[i]);
}

void matmul(std::size_t n, const Complex* a, const Complex* b, Complex* c) {
  for (std::size_t i = 0; i < n; ++i) {
    Complex* row = c + i * n;
    for (std::size_t j = 0; j < n; ++j) row[j] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a[i * n + k];
      const Complex* brow = b + k * n;
      for (std::size_t j = 0; j < n; ++j) {
        const Complex p = mul(aik, brow[j]);
        row[j] = {row[j].real() + p.real(), row[j].imag() + p.imag()};
      }
    }
  }
}

void matmul_real(std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < n; ++i) {
    double* row = c + i * n;
    for (std::size_t j = 0; j < n; ++j) row[j] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      const double* brow = b + k * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aik * brow[j];
    }
  }
}

// Two partial sums (even / odd columns), combined at the end, matching the
// two complex lanes of a 256-bit register.
void matvec(std::size_t rows, std::size_t cols, const Complex* a,
            const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const Complex* arow = a + i * cols;
    Complex even = 0.0, odd = 0.0;
    std::size_t j = 0;
    for (; j + 1 < cols; j += 2) {
      const Complex p0 = mul(arow[j], x[j]);
      const Complex p1 = mul(arow[j + 1], x[j + 1]);
      even = {even.real() + p0.real(), even.imag() + p0.imag()};
      odd = {odd.real() + p1.real(), odd.imag() + p1.imag()};
    }
    if (j < cols) {
      const Complex p0 = mul(arow[j], x[j]);
      even = {even.real() + p0.real(), even.imag() + p0.imag()};
    }
    y[i] = {even.real() + odd.real(), even.imag() + odd.imag()};
  }
}

WeightedSums weighted_sums(std::span<const Complex> w,
                           std::span<const Complex> v) {
  Complex w_even = 0.0, w_odd = 0.0, wv_even = 0.0, wv_odd = 0.0;
  std::size_t i = 0;
  for (; i + 1 < w.size(); i += 2) {
    w_even = {w_even.real() + w[i].real(), w_even.imag() + w[i].imag()};
    w_odd = {w_odd.real() + w[i + 1].real(), w_odd.imag() + w[i + 1].imag()};
    const Complex p0 = mul(w[i], v[i]);
    const Complex p1 = mul(w[i + 1], v[i + 1]);
    wv_even = {wv_even.real() + p0.real(), wv_even.imag() + p0.imag()};
    wv_odd = {wv_odd.real() + p1.real(), wv_odd.imag() + p1.imag()};
  }
  if (i < w.size()) {
    w_even = {w_even.real() + w[i].real(), w_even.imag() + w[i].imag()};
    const Complex p0 = mul(w[i], v[i]);
    wv_even = {wv_even.real() + p0.real(), wv_even.imag() + p0.imag()};
  }
  return {{w_even.real() + w_odd.real(), w_even.imag() + w_odd.imag()},
          {wv_even.real() + wv_odd.real(), wv_even.imag() + wv_odd.imag()}};
}

double max_norm_sq(std::span<const Complex> x) {
  double m = 0.0;
  for (const Complex& z : x) {
    const double s = norm_sq(z);
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    if (s > m) m = s;
  }
  return m;
}

double max_diff_sq(std::span<const Complex> x, std::span<const Complex> y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = norm_sq({x[i].real() - y[i].real(), x[i].imag() - y[i].imag()});
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    if (s > m) m = s;
  }
  return m;
}

constexpr KernelTable kScalar{
    "scalar", euler_update, midpoint,      multiply,    matmul,
    matmul_real, matvec,   weighted_sums, max_norm_sq, max_diff_sq,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace phasespace::kernels
