#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phasespace/common.hpp"
#include "phasespace/ensemble.hpp"
#include "phasespace/estimate.hpp"
#include "phasespace/series.hpp"

namespace phasespace {

using ConstState = std::span<const Complex>;
using MutState = std::span<Complex>;

/// Weighted Ito problem
///
///   d lambda = [A - B g] dt + B dW
///   d Omega  = Omega [U dt + g . dW]
///
/// with dW a vector of n_noise independent real Wiener increments. The
/// diffusion callback applies B(lambda) to a (possibly complex) vector
/// instead of returning the matrix, which is what every stepper needs and
/// avoids materializing dimension x n_noise entries.
struct SdeProblem {
  std::size_t dimension = 0;  // complex components of lambda
  std::size_t n_noise = 0;
  std::function<void(ConstState state, MutState out)> drift;
  std::function<void(ConstState state, ConstState v, MutState out)> diffusion;
  std::function<Complex(ConstState state)> weight_drift;        // empty: U = 0
  std::function<void(ConstState state, MutState out)> gauge;    // empty: g = 0

  void validate() const;
};

/// The problem with every term switched off (lambda and Omega constant).
SdeProblem null_problem(std::size_t dimension, std::size_t n_noise = 0);

struct StepSchedule {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t record_stride = 1;

  double span() const { return dt * static_cast<double>(n_steps); }
  void validate() const;
};

enum class Stepper { euler, midpoint };

std::string to_string(Stepper s);
Stepper stepper_from_string(const std::string& name);

struct EngineOptions {
  Stepper stepper = Stepper::midpoint;
  double divergence_threshold = 1e6;
  double abort_floor = 0.9;  // minimum alive fraction
  int midpoint_iterations = 4;
  double midpoint_tolerance = 1e-12;
  // Each step's noise is the mean of this many sub-increments drawn in
  // sequence. A run at dt with refinement 2 sees the same Wiener path as a
  // run at dt/2 with refinement 1.
  int noise_refinement = 1;
  std::size_t workers = 1;
};

struct StepInfo {
  bool diverged = false;
  bool midpoint_fallback = false;
};

/// One Euler-Maruyama step. `noise` holds zeta = dW/dt (variance 1/dt).
/// Log-weight update is the exact Ito form (U + g.zeta - g.g/2) dt.
template <class Point>
Point step_ito_euler(const Point& point, const SdeProblem& problem, double dt,
                     std::span<const double> noise, const EngineOptions& options = {},
                     StepInfo* info = nullptr);

/// Drift-implicit midpoint step: lambda' = lambda + A((lambda + lambda')/2) dt
/// + B(lambda)(zeta - g) dt, solved by fixed-point iteration from the Euler
/// predictor. Falls back to Euler when the iteration stops contracting.
template <class Point>
Point step_ito_midpoint(const Point& point, const SdeProblem& problem, double dt,
                        std::span<const double> noise, const EngineOptions& options = {},
                        StepInfo* info = nullptr);

template <class Point>
struct Recorder {
  std::vector<std::string> columns;
  std::function<std::vector<ObservableEstimate>(const Ensemble<Point>&)> measure;
};

template <class Point>
struct EvolveResult {
  Ensemble<Point> ensemble;
  MomentSeries series;
  std::size_t dead_count = 0;
  std::size_t midpoint_fallbacks = 0;
  bool aborted = false;
  std::string abort_reason;

  double alive_fraction() const {
    const auto n = ensemble.trajectory_count();
    return n == 0 ? 0.0 : static_cast<double>(ensemble.alive_count()) / static_cast<double>(n);
  }
};

/// Advances every alive trajectory for schedule.n_steps steps. The recorder
/// runs at step 0 and after every record_stride steps. The alive fraction is
/// checked at every record point; falling below options.abort_floor stops
/// the run and returns what was recorded so far.
template <class Point>
EvolveResult<Point> evolve(Ensemble<Point> ensemble, const SdeProblem& problem,
                           const StepSchedule& schedule, const EngineOptions& options,
                           const Recorder<Point>* recorder = nullptr);

}  // namespace phasespace
