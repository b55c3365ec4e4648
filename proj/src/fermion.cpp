#include "phasespace/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "phasespace/kernels.hpp"

namespace phasespace {

std::string LatticeDescriptor::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::chain: os << "chain " << lx; break;
    case Kind::rectangle: os << "rectangle " << lx << "x" << ly; break;
    case Kind::custom: os << "custom"; break;
  }
  if (kind != Kind::custom) os << (periodic ? " periodic" : " open");
  return os.str();
}

void FermiHubbardModel::validate(bool allow_free) const {
  if (sites == 0) throw ConfigError("sites", "at least one site is required");
  if (t_hop.size() != sites * sites) throw ConfigError("t_hop", "must be sites x sites");
  for (std::size_t i = 0; i < sites; ++i) {
    if (hopping(i, i) != 0.0) throw ConfigError("t_hop", "diagonal must be zero");
    for (std::size_t j = 0; j < sites; ++j) {
      if (!std::isfinite(hopping(i, j)) || hopping(i, j) != hopping(j, i)) {
        throw ConfigError("t_hop", "must be finite and symmetric");
      }
    }
  }
  if (!std::isfinite(U) || U < 0.0 || (!allow_free && U == 0.0)) {
    throw ConfigError("U", allow_free ? "must be >= 0" : "must be > 0");
  }
  if (!std::isfinite(mu)) throw ConfigError("mu", "must be finite");
}

FermiHubbardModel FermiHubbardModel::chain(std::size_t sites, double t, double U, double mu,
                                           bool periodic) {
  FermiHubbardModel m;
  m.sites = sites;
  m.t_hop.assign(sites * sites, 0.0);
  m.U = U;
  m.mu = mu;
  m.lattice = {LatticeDescriptor::Kind::chain, sites, 1, periodic};
  for (std::size_t j = 0; j + 1 < sites; ++j) {
    m.t_hop[j * sites + j + 1] = t;
    m.t_hop[(j + 1) * sites + j] = t;
  }
  if (periodic && sites > 2) {
    m.t_hop[sites - 1] = t;
    m.t_hop[(sites - 1) * sites] = t;
  }
  return m;
}

FermiHubbardModel FermiHubbardModel::rectangle(std::size_t lx, std::size_t ly, double t,
                                               double U, double mu, bool periodic) {
  FermiHubbardModel m;
  m.sites = lx * ly;
  m.t_hop.assign(m.sites * m.sites, 0.0);
  m.U = U;
  m.mu = mu;
  m.lattice = {LatticeDescriptor::Kind::rectangle, lx, ly, periodic};
  auto link = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    m.t_hop[a * m.sites + b] = t;
    m.t_hop[b * m.sites + a] = t;
  };
  for (std::size_t y = 0; y < ly; ++y) {
    for (std::size_t x = 0; x < lx; ++x) {
      const std::size_t s = y * lx + x;
      if (x + 1 < lx) link(s, s + 1);
      else if (periodic && lx > 2) link(s, y * lx);
      if (y + 1 < ly) link(s, s + lx);
      else if (periodic && ly > 2) link(s, x);
    }
  }
  return m;
}

ThermalSchedule ThermalSchedule::uniform(double tau_max, double d_tau, double record_spacing) {
  ThermalSchedule s{tau_max, d_tau, {}};
  const auto n = static_cast<std::size_t>(std::llround(tau_max / record_spacing));
  for (std::size_t k = 0; k <= n; ++k) s.record_taus.push_back(record_spacing * static_cast<double>(k));
  return s;
}

void ThermalSchedule::validate() const {
  if (!(d_tau > 0.0) || !std::isfinite(d_tau)) throw ConfigError("d_tau", "must be > 0");
  if (!(tau_max >= d_tau)) throw ConfigError("tau_max", "must be >= d_tau");
  double prev = -1.0;
  for (double tau : record_taus) {
    if (tau < 0.0 || tau > tau_max * (1.0 + 1e-12)) {
      throw ConfigError("record_taus", "values must lie in [0, tau_max]");
    }
    const double steps = tau / d_tau;
    if (std::abs(steps - std::round(steps)) > 1e-8 * std::max(1.0, steps)) {
      throw ConfigError("record_taus", "values must lie on the d_tau grid");
    }
    if (tau <= prev) throw ConfigError("record_taus", "values must be increasing");
    prev = tau;
  }
}

std::size_t ThermalSchedule::step_of(double tau) const {
  return static_cast<std::size_t>(std::llround(tau / d_tau));
}

namespace {

struct FermiScratch {
  std::vector<Complex> t0, p, q, r, x, y, d1, d2;
  std::vector<double> rn, rt, rp, rq, rr, rx, ry;
  void resize(std::size_t m) {
    const std::size_t mm = m * m;
    for (auto* v : {&t0, &p, &q, &r, &x, &y}) v->resize(mm);
    for (auto* v : {&rn, &rt, &rp, &rq, &rr, &rx, &ry}) v->resize(mm);
    d1.resize(m);
    d2.resize(m);
  }
};

// Trajectories stay exactly real, and on real inputs the complex kernels
// produce the same real parts with zero imaginary parts. The real path is a
// faster route to identical numbers; anything complex takes the general one.
bool exactly_real(std::span<const Complex> v) {
  for (Complex z : v) {
    if (z.imag() != 0.0) return false;
  }
  return true;
}

FermiScratch& scratch(std::size_t m) {
  thread_local FermiScratch s;
  if (s.d1.size() != m) s.resize(m);
  return s;
}

// sigma = -1 for spin up, +1 for spin down.
constexpr double spin_sign(Spin s) { return s == Spin::up ? -1.0 : 1.0; }

}  // namespace

SdeProblem fermi_hubbard_problem(const FermiHubbardModel& model) {
  model.validate();
  const std::size_t m = model.sites, mm = m * m;
  const double U = model.U, mu = model.mu;
  auto hop = std::make_shared<std::vector<Complex>>(mm);
  for (std::size_t k = 0; k < mm; ++k) (*hop)[k] = model.t_hop[k];

  SdeProblem p;
  p.dimension = 2 * mm;
  p.n_noise = 2 * m;

  p.drift = [m, mm, U, mu, hop](ConstState s, MutState out) {
    const auto& kern = kernels::active();
    FermiScratch& w = scratch(m);
    const bool real = exactly_real(s);
    for (Spin spin : {Spin::up, Spin::down}) {
      const std::size_t self = spin == Spin::up ? 0 : mm;
      const std::size_t other = spin == Spin::up ? mm : 0;
      const Complex* n = s.data() + self;
      Complex* o = out.data() + self;
      if (real) {
        for (std::size_t k = 0; k < mm; ++k) {
          w.rn[k] = n[k].real();
          w.rt[k] = (*hop)[k].real();
        }
        for (std::size_t j = 0; j < m; ++j) {
          w.rt[j * m + j] -= U * s[other + j * m + j].real() - mu;
        }
        kern.matmul_real(m, w.rt.data(), w.rn.data(), w.rp.data());
        kern.matmul_real(m, w.rn.data(), w.rt.data(), w.rq.data());
        kern.matmul_real(m, w.rn.data(), w.rp.data(), w.rr.data());
        for (std::size_t k = 0; k < mm; ++k) o[k] = 0.5 * (w.rp[k] + w.rq[k]) - w.rr[k];
        continue;
      }
      std::copy(hop->begin(), hop->end(), w.t0.begin());
      for (std::size_t j = 0; j < m; ++j) {
        w.t0[j * m + j] -= U * s[other + j * m + j] - mu;
      }
      kern.matmul(m, w.t0.data(), n, w.p.data());     // T n
      kern.matmul(m, n, w.t0.data(), w.q.data());     // n T
      kern.matmul(m, n, w.p.data(), w.r.data());      // n T n
      for (std::size_t k = 0; k < mm; ++k) o[k] = 0.5 * (w.p[k] + w.q[k]) - w.r[k];
    }
  };

  const double amplitude = std::sqrt(2.0 * U);
  p.diffusion = [m, mm, amplitude](ConstState s, ConstState v, MutState out) {
    const auto& kern = kernels::active();
    FermiScratch& w = scratch(m);
    const bool real = exactly_real(s) && exactly_real(v);
    for (Spin spin : {Spin::up, Spin::down}) {
      const std::size_t self = spin == Spin::up ? 0 : mm;
      const double coeff = -spin_sign(spin) * amplitude;
      const Complex* n = s.data() + self;
      Complex* o = out.data() + self;
      if (real) {
        for (std::size_t k = 0; k < mm; ++k) w.rn[k] = n[k].real();
        for (std::size_t i = 0; i < m; ++i) {
          const double d1 = coeff * v[i].real();
          for (std::size_t j = 0; j < m; ++j) {
            w.rx[i * m + j] = d1 * w.rn[i * m + j];                // D1 n
            w.ry[i * m + j] = w.rn[i * m + j] * (coeff * v[m + j].real());  // n D2
          }
        }
        kern.matmul_real(m, w.rn.data(), w.rx.data(), w.rp.data());  // n D1 n
        kern.matmul_real(m, w.ry.data(), w.rn.data(), w.rq.data());  // n D2 n
        for (std::size_t k = 0; k < mm; ++k) {
          o[k] = 0.5 * ((w.rx[k] - w.rp[k]) + (w.ry[k] - w.rq[k]));
        }
        continue;
      }
      for (std::size_t j = 0; j < m; ++j) {
        w.d1[j] = coeff * v[j];
        w.d2[j] = coeff * v[m + j];
      }
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          w.x[i * m + j] = w.d1[i] * n[i * m + j];  // D1 n
          w.y[i * m + j] = n[i * m + j] * w.d2[j];  // n D2
        }
      }
      kern.matmul(m, n, w.x.data(), w.p.data());    // n D1 n
      kern.matmul(m, w.y.data(), n, w.q.data());    // n D2 n
      for (std::size_t k = 0; k < mm; ++k) {
        o[k] = 0.5 * ((w.x[k] - w.p[k]) + (w.y[k] - w.q[k]));
      }
    }
  };

  p.weight_drift = [m, mm, U, mu, hop](ConstState s) {
    Complex hopping{}, interaction{}, number{};
    for (std::size_t k = 0; k < mm; ++k) hopping += (*hop)[k] * (s[k] + s[mm + k]);
    for (std::size_t j = 0; j < m; ++j) {
      const Complex up = s[j * m + j], down = s[mm + j * m + j];
      interaction += down * up;
      number += up + down;
    }
    // -(H - mu N) with H = -sum t n + U sum n_down n_up
    return hopping - U * interaction + mu * number;
  };
  return p;
}

Ensemble<FermiPoint> init_infinite_temperature(const FermiHubbardModel& model,
                                               std::size_t trajectory_count,
                                               std::uint64_t seed) {
  model.validate(true);
  if (trajectory_count == 0) throw ConfigError("trajectories", "must be at least 1");
  FermiPoint p(model.sites);
  for (Spin s : {Spin::up, Spin::down}) {
    for (std::size_t j = 0; j < model.sites; ++j) p.n(s, j, j) = 0.5;
  }
  return Ensemble<FermiPoint>(std::vector<FermiPoint>(trajectory_count, p), seed);
}

ObservableEstimate estimate_double_occupancy(const Ensemble<FermiPoint>& ensemble, int n_sub) {
  return weighted_mean<FermiPoint>(
      ensemble,
      [](const FermiPoint& p) {
        Complex sum{};
        for (std::size_t j = 0; j < p.sites; ++j) sum += p.n(Spin::down, j, j) * p.n(Spin::up, j, j);
        return sum / static_cast<double>(p.sites);
      },
      n_sub);
}

ObservableEstimate estimate_energy(const Ensemble<FermiPoint>& ensemble,
                                   const FermiHubbardModel& model, int n_sub) {
  return weighted_mean<FermiPoint>(
      ensemble,
      [&model](const FermiPoint& p) {
        Complex e{};
        for (std::size_t i = 0; i < p.sites; ++i) {
          for (std::size_t j = 0; j < p.sites; ++j) {
            const double t = model.hopping(i, j);
            if (t != 0.0) e -= t * (p.n(Spin::up, i, j) + p.n(Spin::down, i, j));
          }
          e += model.U * p.n(Spin::down, i, i) * p.n(Spin::up, i, i);
        }
        return e;
      },
      n_sub);
}

ObservableEstimate estimate_density(const Ensemble<FermiPoint>& ensemble, Spin spin, int n_sub) {
  return weighted_mean<FermiPoint>(
      ensemble,
      [spin](const FermiPoint& p) {
        Complex sum{};
        for (std::size_t j = 0; j < p.sites; ++j) sum += p.n(spin, j, j);
        return sum / static_cast<double>(p.sites);
      },
      n_sub);
}

double max_relative_imaginary(const Ensemble<FermiPoint>& ensemble) {
  double worst = 0.0;
  for (const auto& p : ensemble.points) {
    if (!p.alive) continue;
    for (const Complex& z : p.state) {
      worst = std::max(worst, std::abs(z.imag()) / std::max(1.0, std::abs(z)));
    }
  }
  return worst;
}

EvolveResult<FermiPoint> evolve_thermal(Ensemble<FermiPoint> ensemble,
                                        const FermiHubbardModel& model,
                                        const ThermalSchedule& schedule,
                                        const EngineOptions& options, int n_sub) {
  schedule.validate();
  const SdeProblem problem = fermi_hubbard_problem(model);

  EvolveResult<FermiPoint> result;
  result.ensemble = std::move(ensemble);
  auto& series = result.series;
  series.axis = "tau";
  series.columns = {"n_up", "n_down", "double_occupancy", "energy"};

  auto measure = [&] {
    const auto& ens = result.ensemble;
    if (max_relative_imaginary(ens) > 1e-8) {
      throw ConsistencyError("fermionic Green's function acquired imaginary parts");
    }
    series.times.push_back(ens.time);
    series.rows.push_back({estimate_density(ens, Spin::up, n_sub),
                           estimate_density(ens, Spin::down, n_sub),
                           estimate_double_occupancy(ens, n_sub),
                           estimate_energy(ens, model, n_sub)});
    series.n_alive.push_back(ens.alive_count());
  };

  for (double tau : schedule.record_taus) {
    const std::size_t target = schedule.step_of(tau);
    const std::size_t current = result.ensemble.step_index;
    if (target < current) throw ConfigError("record_taus", "must be increasing");
    if (target > current) {
      const std::size_t steps = target - current;
      auto part = evolve(std::move(result.ensemble), problem,
                         StepSchedule{schedule.d_tau, steps, steps}, options,
                         static_cast<const Recorder<FermiPoint>*>(nullptr));
      result.ensemble = std::move(part.ensemble);
      result.ensemble.time = schedule.d_tau * static_cast<double>(result.ensemble.step_index);
      result.dead_count += part.dead_count;
      result.midpoint_fallbacks += part.midpoint_fallbacks;
      if (part.aborted) {
        result.aborted = true;
        result.abort_reason = part.abort_reason;
        return result;
      }
    }
    measure();
  }
  return result;
}

ExtrapolatedThermal evolve_thermal_extrapolated(const Ensemble<FermiPoint>& initial,
                                                const FermiHubbardModel& model,
                                                const ThermalSchedule& schedule,
                                                const EngineOptions& options, int n_sub) {
  schedule.validate();
  EngineOptions coarse_opts = options;
  coarse_opts.noise_refinement = 2 * options.noise_refinement;
  ThermalSchedule fine_schedule = schedule;
  fine_schedule.d_tau = 0.5 * schedule.d_tau;
  ExtrapolatedThermal out{{}, evolve_thermal(initial, model, schedule, coarse_opts, n_sub),
                          evolve_thermal(initial, model, fine_schedule, options, n_sub)};
  if (!out.aborted()) out.series = richardson(out.coarse.series, out.fine.series);
  return out;
}

}  // namespace phasespace
