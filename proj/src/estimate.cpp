#include "phasespace/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phasespace/kernels.hpp"
#include "phasespace/series.hpp"

namespace phasespace {

PhasePoint::PhasePoint(std::span<const Complex> alpha, std::span<const Complex> beta) {
  if (alpha.size() != beta.size() || alpha.empty()) {
    throw PreconditionError("PhasePoint: alpha and beta need equal nonzero length");
  }
  state.reserve(2 * alpha.size());
  state.insert(state.end(), alpha.begin(), alpha.end());
  state.insert(state.end(), beta.begin(), beta.end());
}

PhasePoint PhasePoint::coherent(std::span<const Complex> alpha) {
  std::vector<Complex> beta(alpha.size());
  std::transform(alpha.begin(), alpha.end(), beta.begin(),
                 [](Complex a) { return std::conj(a); });
  return PhasePoint(alpha, beta);
}

template <class Point>
std::vector<double> derive_noise(Ensemble<Point>& ensemble, std::size_t traj,
                                 std::size_t count, double variance) {
  if (traj >= ensemble.trajectory_count()) {
    throw IndexError("derive_noise: trajectory " + std::to_string(traj) +
                     " out of range " + std::to_string(ensemble.trajectory_count()));
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw PreconditionError("derive_noise: variance must be positive");
  }
  std::vector<double> out(count);
  ensemble.streams[traj].normal(out, std::sqrt(variance));
  return out;
}

template std::vector<double> derive_noise(Ensemble<PhasePoint>&, std::size_t,
                                          std::size_t, double);
template std::vector<double> derive_noise(Ensemble<FermiPoint>&, std::size_t,
                                          std::size_t, double);

namespace {

struct Block {
  std::size_t begin, end;
};

std::vector<Block> partition(std::size_t n, int n_sub) {
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(n_sub));
  const auto subs = static_cast<std::size_t>(n_sub);
  for (std::size_t b = 0; b < subs; ++b) blocks.push_back({b * n / subs, (b + 1) * n / subs});
  return blocks;
}

}  // namespace

double block_standard_error(std::span<const Complex> blocks) {
  const auto n = static_cast<double>(blocks.size());
  if (blocks.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  Complex centre{};
  for (Complex v : blocks) centre += v;
  centre /= n;
  double ss = 0.0;
  for (Complex v : blocks) ss += std::norm(v - centre);
  return std::sqrt(ss / (n - 1.0) / n);
}

template <class Point>
std::vector<ObservableEstimate> weighted_functions(
    const Ensemble<Point>& ensemble, std::span<const Observable<Point>> observables,
    std::span<const Combiner> combiners, int n_sub) {
  if (n_sub < 2) throw PreconditionError("weighted estimate: n_sub must be at least 2");
  const std::size_t n = ensemble.trajectory_count();
  if (static_cast<std::size_t>(n_sub) > n) {
    throw PreconditionError("weighted estimate: more sub-ensembles than trajectories");
  }

  double shift = -std::numeric_limits<double>::infinity();
  std::size_t n_alive = 0;
  for (const auto& p : ensemble.points) {
    if (!p.alive) continue;
    ++n_alive;
    shift = std::max(shift, log_weight_of(p).real());
  }
  if (n_alive == 0) throw EstimationError("weighted estimate: all trajectories are dead");

  std::vector<Complex> weights(n, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = ensemble.points[k];
    if (p.alive) weights[k] = std::exp(log_weight_of(p) - shift);
  }

  std::vector<std::vector<Complex>> values(observables.size(), std::vector<Complex>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = ensemble.points[k];
    if (!p.alive) continue;
    for (std::size_t o = 0; o < observables.size(); ++o) values[o][k] = observables[o](p);
  }

  const auto& kern = kernels::active();
  auto means_over = [&](std::size_t begin, std::size_t end) {
    std::vector<Complex> means(observables.size());
    const std::span<const Complex> w(weights.data() + begin, end - begin);
    for (std::size_t o = 0; o < observables.size(); ++o) {
      const auto sums = kern.weighted_sums(w, {values[o].data() + begin, end - begin});
      means[o] = ratio(sums.weighted_value_sum, sums.weight_sum);
    }
    return means;
  };

  const std::vector<Complex> full = means_over(0, n);
  const auto blocks = partition(n, n_sub);
  std::vector<std::vector<Complex>> block_means;
  block_means.reserve(blocks.size());
  for (const Block& b : blocks) {
    const bool any_alive = std::any_of(ensemble.points.begin() + b.begin,
                                       ensemble.points.begin() + b.end,
                                       [](const Point& p) { return p.alive; });
    if (!any_alive) {
      throw EstimationError("weighted estimate: sub-ensemble [" + std::to_string(b.begin) +
                            ", " + std::to_string(b.end) + ") has no alive trajectory");
    }
    block_means.push_back(means_over(b.begin, b.end));
  }

  std::vector<ObservableEstimate> out;
  out.reserve(combiners.size());
  for (const Combiner& combine : combiners) {
    ObservableEstimate est;
    est.mean = combine(full);
    est.n_subensembles = n_sub;
    est.n_alive = n_alive;
    est.blocks.resize(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) est.blocks[b] = combine(block_means[b]);
    est.std_error = block_standard_error(est.blocks);
    if (!std::isfinite(est.std_error) || !std::isfinite(est.mean.real()) ||
        !std::isfinite(est.mean.imag())) {
      est.reliable = false;
    }
    out.push_back(est);
  }
  return out;
}

template <class Point>
ObservableEstimate weighted_function(const Ensemble<Point>& ensemble,
                                     std::span<const Observable<Point>> observables,
                                     const Combiner& combine, int n_sub) {
  return weighted_functions(ensemble, observables, std::span<const Combiner>(&combine, 1),
                            n_sub)
      .front();
}

template <class Point>
ObservableEstimate weighted_mean(const Ensemble<Point>& ensemble,
                                 const Observable<Point>& observable, int n_sub) {
  const Combiner identity = [](std::span<const Complex> m) { return m[0]; };
  return weighted_function(ensemble, std::span<const Observable<Point>>(&observable, 1),
                           identity, n_sub);
}

#define PHASESPACE_INSTANTIATE(P)                                                    \
  template std::vector<ObservableEstimate> weighted_functions(                       \
      const Ensemble<P>&, std::span<const Observable<P>>, std::span<const Combiner>, \
      int);                                                                          \
  template ObservableEstimate weighted_function(                                     \
      const Ensemble<P>&, std::span<const Observable<P>>, const Combiner&, int);     \
  template ObservableEstimate weighted_mean(const Ensemble<P>&, const Observable<P>&, int);

PHASESPACE_INSTANTIATE(PhasePoint)
PHASESPACE_INSTANTIATE(FermiPoint)
#undef PHASESPACE_INSTANTIATE

ObservableEstimate estimate_quadratic_moment(const Ensemble<PhasePoint>& ensemble,
                                             std::size_t i, std::size_t j, int n_sub) {
  const std::size_t m = ensemble.points.empty() ? 0 : ensemble.points.front().modes();
  if (i >= m || j >= m) throw IndexError("estimate_quadratic_moment: mode index out of range");
  return weighted_mean<PhasePoint>(
      ensemble,
      [i, j](const PhasePoint& p) { return p.beta()[i] * p.alpha()[j]; }, n_sub);
}

ObservableEstimate estimate_quadratic_moment(const Ensemble<FermiPoint>& ensemble,
                                             std::size_t i, std::size_t j,
                                             SpinSelection spin, int n_sub) {
  const std::size_t m = ensemble.points.empty() ? 0 : ensemble.points.front().sites;
  if (i >= m || j >= m) throw IndexError("estimate_quadratic_moment: site index out of range");
  return weighted_mean<FermiPoint>(
      ensemble,
      [i, j, spin](const FermiPoint& p) {
        switch (spin) {
          case SpinSelection::up: return p.n(Spin::up, i, j);
          case SpinSelection::down: return p.n(Spin::down, i, j);
          case SpinSelection::sum: break;
        }
        return p.n(Spin::up, i, j) + p.n(Spin::down, i, j);
      },
      n_sub);
}

MomentSeries richardson(const MomentSeries& coarse, const MomentSeries& fine) {
  if (coarse.columns != fine.columns || coarse.times.size() != fine.times.size()) {
    throw PreconditionError("richardson: series have different shapes");
  }
  MomentSeries out = fine;
  for (std::size_t r = 0; r < fine.size(); ++r) {
    if (std::abs(coarse.times[r] - fine.times[r]) > 1e-9 * std::max(1.0, std::abs(fine.times[r]))) {
      throw PreconditionError("richardson: record times differ");
    }
    out.n_alive[r] = std::min(coarse.n_alive[r], fine.n_alive[r]);
    for (std::size_t c = 0; c < fine.columns.size(); ++c) {
      const auto& a = coarse.rows[r][c];
      const auto& b = fine.rows[r][c];
      if (a.blocks.size() != b.blocks.size()) {
        throw PreconditionError("richardson: sub-ensemble counts differ");
      }
      auto& e = out.rows[r][c];
      e.mean = 2.0 * b.mean - a.mean;
      for (std::size_t k = 0; k < b.blocks.size(); ++k) e.blocks[k] = 2.0 * b.blocks[k] - a.blocks[k];
      e.std_error = block_standard_error(e.blocks);
      e.n_alive = std::min(a.n_alive, b.n_alive);
      e.reliable = a.reliable && b.reliable && std::isfinite(e.std_error);
    }
  }
  return out;
}

}  // namespace phasespace
