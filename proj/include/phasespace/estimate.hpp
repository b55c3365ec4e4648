#pragma once

#include <functional>
#include <span>
#include <vector>

#include "phasespace/common.hpp"
#include "phasespace/ensemble.hpp"

namespace phasespace {

inline constexpr int kDefaultSubensembles = 10;

/// Weighted ensemble estimate. The error is the spread of the means of
/// `n_subensembles` contiguous blocks of trajectories divided by
/// sqrt(n_subensembles).
struct ObservableEstimate {
  Complex mean{0.0, 0.0};
  double std_error = 0.0;
  int n_subensembles = 0;
  std::size_t n_alive = 0;
  bool reliable = true;
  std::vector<Complex> blocks;  // per-sub-ensemble values behind std_error
};

/// Spread of block values divided by sqrt(count).
double block_standard_error(std::span<const Complex> blocks);

template <class Point>
using Observable = std::function<Complex(const Point&)>;

/// Combines full-ensemble (or per-block) weighted means into a derived value.
using Combiner = std::function<Complex(std::span<const Complex>)>;

/// sum_k w_k O_k / sum_k w_k over alive trajectories, w_k = exp(log_weight_k)
/// after subtracting the largest real log-weight.
template <class Point>
ObservableEstimate weighted_mean(const Ensemble<Point>& ensemble,
                                 const Observable<Point>& observable,
                                 int n_sub = kDefaultSubensembles);

/// f(<O_1>, ..., <O_n>) with the error propagated through the block spread of
/// f evaluated on per-block means.
template <class Point>
ObservableEstimate weighted_function(const Ensemble<Point>& ensemble,
                                     std::span<const Observable<Point>> observables,
                                     const Combiner& combine,
                                     int n_sub = kDefaultSubensembles);

/// Several derived quantities sharing one pass over the ensemble. Each
/// combiner sees all weighted means.
template <class Point>
std::vector<ObservableEstimate> weighted_functions(
    const Ensemble<Point>& ensemble, std::span<const Observable<Point>> observables,
    std::span<const Combiner> combiners, int n_sub = kDefaultSubensembles);

/// <a_i^dag a_j> = <beta_i alpha_j>_P.
ObservableEstimate estimate_quadratic_moment(const Ensemble<PhasePoint>& ensemble,
                                             std::size_t i, std::size_t j,
                                             int n_sub = kDefaultSubensembles);

enum class SpinSelection { up, down, sum };

/// <a_{i s}^dag a_{j s}> = <n_ij,s>_P, per spin or summed over spins.
ObservableEstimate estimate_quadratic_moment(const Ensemble<FermiPoint>& ensemble,
                                             std::size_t i, std::size_t j,
                                             SpinSelection spin,
                                             int n_sub = kDefaultSubensembles);

/// z / w without the rescaling and NaN recovery of std::complex division, so
/// that z / z is exactly one.
inline Complex ratio(Complex z, Complex w) {
  const double den = w.real() * w.real() + w.imag() * w.imag();
  return {(z.real() * w.real() + z.imag() * w.imag()) / den,
          (z.imag() * w.real() - z.real() * w.imag()) / den};
}

}  // namespace phasespace
