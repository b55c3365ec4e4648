#include "phasespace/sde.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "phasespace/kernels.hpp"

namespace phasespace {

void SdeProblem::validate() const {
  if (dimension == 0) throw PreconditionError("SdeProblem: dimension must be positive");
  if (!drift) throw PreconditionError("SdeProblem: drift callback missing");
  if (n_noise > 0 && !diffusion) {
    throw PreconditionError("SdeProblem: diffusion callback missing for n_noise > 0");
  }
}

SdeProblem null_problem(std::size_t dimension, std::size_t n_noise) {
  SdeProblem p;
  p.dimension = dimension;
  p.n_noise = n_noise;
  p.drift = [](ConstState, MutState out) { std::fill(out.begin(), out.end(), Complex{}); };
  if (n_noise > 0) {
    p.diffusion = [](ConstState, ConstState, MutState out) {
      std::fill(out.begin(), out.end(), Complex{});
    };
  }
  return p;
}

void StepSchedule::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("StepSchedule: dt must be > 0");
  if (record_stride == 0) throw PreconditionError("StepSchedule: record_stride must be >= 1");
  if (n_steps % record_stride != 0) {
    throw PreconditionError("StepSchedule: record_stride must divide n_steps");
  }
}

std::string to_string(Stepper s) { return s == Stepper::euler ? "euler" : "midpoint"; }

Stepper stepper_from_string(const std::string& name) {
  if (name == "euler") return Stepper::euler;
  if (name == "midpoint") return Stepper::midpoint;
  throw PreconditionError("unknown stepper '" + name + "'");
}

namespace {

void add_log_weight(PhasePoint& p, Complex d) { p.log_weight += d; }

void add_log_weight(FermiPoint& p, Complex d) {
  if (std::abs(d.imag()) > 1e-8 * std::max(1.0, std::abs(d.real()))) {
    throw ConsistencyError("fermionic weight acquired an imaginary increment");
  }
  p.log_weight += d.real();
}

struct Workspace {
  std::vector<Complex> x, y, y_euler, mid, a, noise_term, gauge, shifted;
  std::vector<double> zeta, sub;

  explicit Workspace(const SdeProblem& problem)
      : x(problem.dimension),
        y(problem.dimension),
        y_euler(problem.dimension),
        mid(problem.dimension),
        a(problem.dimension),
        noise_term(problem.dimension),
        gauge(problem.n_noise),
        shifted(problem.n_noise),
        zeta(problem.n_noise),
        sub(problem.n_noise) {}
};

template <class Point>
StepInfo step_in_place(Point& point, const SdeProblem& problem, double dt,
                       std::span<const double> zeta, const EngineOptions& options,
                       Workspace& ws) {
  const auto& kern = kernels::active();
  StepInfo info;
  if (point.state.size() != problem.dimension) {
    throw PreconditionError("step: state dimension does not match problem");
  }
  if (zeta.size() != problem.n_noise) throw PreconditionError("step: noise length != n_noise");

  std::copy(point.state.begin(), point.state.end(), ws.x.begin());
  const ConstState x(ws.x);

  // Gauge shift and weight increment use the start-of-step state.
  Complex dlog = problem.weight_drift ? problem.weight_drift(x) : Complex{};
  if (problem.n_noise > 0) {
    if (problem.gauge) {
      problem.gauge(x, ws.gauge);
    } else {
      std::fill(ws.gauge.begin(), ws.gauge.end(), Complex{});
    }
    Complex gz{}, gg{};
    for (std::size_t k = 0; k < problem.n_noise; ++k) {
      ws.shifted[k] = zeta[k] - ws.gauge[k];
      gz += ws.gauge[k] * zeta[k];
      gg += ws.gauge[k] * ws.gauge[k];
    }
    dlog += gz - 0.5 * gg;
    problem.diffusion(x, ws.shifted, ws.noise_term);
  } else {
    std::fill(ws.noise_term.begin(), ws.noise_term.end(), Complex{});
  }
  dlog *= dt;

  problem.drift(x, ws.a);
  kern.euler_update(x, ws.a, ws.noise_term, dt, ws.y_euler);
  std::span<const Complex> result = ws.y_euler;

  if (options.stepper == Stepper::midpoint && options.midpoint_iterations > 1) {
    std::copy(ws.y_euler.begin(), ws.y_euler.end(), ws.y.begin());
    const double tol_sq = options.midpoint_tolerance * options.midpoint_tolerance;
    double prev = std::numeric_limits<double>::infinity();
    bool failed = false;
    for (int it = 1; it < options.midpoint_iterations; ++it) {
      kern.midpoint(x, ws.y, ws.mid);
      problem.drift(ws.mid, ws.a);
      kern.euler_update(x, ws.a, ws.noise_term, dt, ws.mid);  // mid now holds y_new
      const double delta = kern.max_diff_sq(ws.mid, ws.y);
      std::swap(ws.y, ws.mid);
      if (delta <= tol_sq) break;
      if (!(delta < prev)) {
        failed = true;
        break;
      }
      prev = delta;
    }
    if (failed) {
      info.midpoint_fallback = true;
    } else {
      result = ws.y;
    }
  }

  const double limit = options.divergence_threshold * options.divergence_threshold;
  const bool finite_weight = std::isfinite(dlog.real()) && std::isfinite(dlog.imag());
  if (!(kern.max_norm_sq(result) <= limit) || !finite_weight) {
    info.diverged = true;
    point.alive = false;
    return info;
  }
  std::copy(result.begin(), result.end(), point.state.begin());
  add_log_weight(point, dlog);
  return info;
}

void draw_noise(NoiseStream& stream, double dt, int refinement, Workspace& ws) {
  const double stddev = std::sqrt(static_cast<double>(refinement) / dt);
  if (refinement == 1) {
    stream.normal(ws.zeta, stddev);
    return;
  }
  std::fill(ws.zeta.begin(), ws.zeta.end(), 0.0);
  for (int r = 0; r < refinement; ++r) {
    stream.normal(ws.sub, stddev);
    for (std::size_t k = 0; k < ws.zeta.size(); ++k) ws.zeta[k] += ws.sub[k];
  }
  for (double& z : ws.zeta) z /= static_cast<double>(refinement);
}

template <class Point>
Point step_copy(const Point& point, const SdeProblem& problem, double dt,
                std::span<const double> noise, EngineOptions options, Stepper stepper,
                StepInfo* info) {
  problem.validate();
  if (!point.alive) throw PreconditionError("step: trajectory is dead");
  options.stepper = stepper;
  Workspace ws(problem);
  Point out = point;
  const StepInfo i = step_in_place(out, problem, dt, noise, options, ws);
  if (info) *info = i;
  return out;
}

}  // namespace

template <class Point>
Point step_ito_euler(const Point& point, const SdeProblem& problem, double dt,
                     std::span<const double> noise, const EngineOptions& options,
                     StepInfo* info) {
  return step_copy(point, problem, dt, noise, options, Stepper::euler, info);
}

template <class Point>
Point step_ito_midpoint(const Point& point, const SdeProblem& problem, double dt,
                        std::span<const double> noise, const EngineOptions& options,
                        StepInfo* info) {
  return step_copy(point, problem, dt, noise, options, Stepper::midpoint, info);
}

template <class Point>
EvolveResult<Point> evolve(Ensemble<Point> ensemble, const SdeProblem& problem,
                           const StepSchedule& schedule, const EngineOptions& options,
                           const Recorder<Point>* recorder) {
  problem.validate();
  schedule.validate();
  if (options.noise_refinement < 1) throw PreconditionError("noise_refinement must be >= 1");
  if (!(options.abort_floor >= 0.0 && options.abort_floor <= 1.0)) {
    throw PreconditionError("abort_floor must lie in [0, 1]");
  }

  EvolveResult<Point> result;
  result.ensemble = std::move(ensemble);
  auto& ens = result.ensemble;
  if (recorder) result.series.columns = recorder->columns;

  auto record = [&] {
    if (!recorder) return;
    result.series.times.push_back(ens.time);
    result.series.rows.push_back(recorder->measure(ens));
    result.series.n_alive.push_back(ens.alive_count());
  };
  record();

  const double t0 = ens.time;
  const std::size_t base_step = ens.step_index;
  const std::size_t n = ens.trajectory_count();
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(n, 1));

  std::size_t done = 0;
  while (done < schedule.n_steps) {
    const std::size_t segment = std::min(schedule.record_stride, schedule.n_steps - done);
    std::vector<std::size_t> dead(workers, 0), fallbacks(workers, 0);
    std::vector<std::exception_ptr> errors(workers);

    auto work = [&](std::size_t w) {
      try {
        Workspace ws(problem);
        const std::size_t begin = w * n / workers, end = (w + 1) * n / workers;
        for (std::size_t k = begin; k < end; ++k) {
          Point& p = ens.points[k];
          for (std::size_t s = 0; s < segment && p.alive; ++s) {
            draw_noise(ens.streams[k], schedule.dt, options.noise_refinement, ws);
            const StepInfo info = step_in_place(p, problem, schedule.dt, ws.zeta, options, ws);
            fallbacks[w] += info.midpoint_fallback ? 1 : 0;
            if (info.diverged) {
              p.died_at_step = static_cast<std::int64_t>(base_step + done + s + 1);
              ++dead[w];
            }
          }
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };

    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t w = 0; w < workers; ++w) {
      result.dead_count += dead[w];
      result.midpoint_fallbacks += fallbacks[w];
    }

    done += segment;
    ens.step_index = base_step + done;
    ens.time = t0 + schedule.dt * static_cast<double>(done);

    const double alive = n == 0 ? 1.0 : static_cast<double>(ens.alive_count()) / static_cast<double>(n);
    if (alive < options.abort_floor) {
      result.aborted = true;
      result.abort_reason = "alive fraction " + std::to_string(alive) + " below floor " +
                            std::to_string(options.abort_floor) + " at step " +
                            std::to_string(ens.step_index);
      break;
    }
    record();
  }
  return result;
}

#define PHASESPACE_INSTANTIATE(P)                                                         \
  template P step_ito_euler(const P&, const SdeProblem&, double, std::span<const double>, \
                            const EngineOptions&, StepInfo*);                             \
  template P step_ito_midpoint(const P&, const SdeProblem&, double,                      \
                               std::span<const double>, const EngineOptions&, StepInfo*); \
  template EvolveResult<P> evolve(Ensemble<P>, const SdeProblem&, const StepSchedule&,    \
                                  const EngineOptions&, const Recorder<P>*);

PHASESPACE_INSTANTIATE(PhasePoint)
PHASESPACE_INSTANTIATE(FermiPoint)
#undef PHASESPACE_INSTANTIATE

}  // namespace phasespace
