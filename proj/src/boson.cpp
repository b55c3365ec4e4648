#include "phasespace/boson.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "phasespace/kernels.hpp"

namespace phasespace {

namespace {

const Complex kI{0.0, 1.0};

Complex principal_sqrt(Complex z) { return std::sqrt(z); }

struct SparseEntry {
  std::size_t row, col;
  Complex value;
};

std::vector<SparseEntry> nonzeros(const BoseLatticeModel& model) {
  std::vector<SparseEntry> out;
  for (std::size_t i = 0; i < model.modes; ++i) {
    for (std::size_t j = 0; j < model.modes; ++j) {
      const Complex w = model.coupling(i, j);
      if (w != Complex{}) out.push_back({i, j, w});
    }
  }
  return out;
}

}  // namespace

void BoseLatticeModel::validate() const {
  if (modes == 0) throw ConfigError("modes", "at least one mode is required");
  if (omega.size() != modes * modes) throw ConfigError("omega", "must be modes x modes");
  if (!std::isfinite(chi)) throw ConfigError("chi", "must be finite");
  for (std::size_t i = 0; i < modes; ++i) {
    for (std::size_t j = 0; j < modes; ++j) {
      const Complex a = coupling(i, j), b = std::conj(coupling(j, i));
      if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) {
        throw ConfigError("omega", "must be Hermitian");
      }
    }
  }
}

BoseLatticeModel BoseLatticeModel::single_mode(double frequency, double chi) {
  return {1, {Complex{frequency, 0.0}}, chi};
}

BoseLatticeModel BoseLatticeModel::chain(std::size_t modes, double hopping, double chi,
                                         double onsite, bool periodic) {
  BoseLatticeModel m{modes, std::vector<Complex>(modes * modes), chi};
  for (std::size_t j = 0; j < modes; ++j) {
    m.omega[j * modes + j] = onsite;
    if (j + 1 < modes) {
      m.omega[j * modes + j + 1] = -hopping;
      m.omega[(j + 1) * modes + j] = -hopping;
    }
  }
  if (periodic && modes > 2) {
    m.omega[modes - 1] = -hopping;
    m.omega[(modes - 1) * modes] = -hopping;
  }
  return m;
}

KerrGaugeConfig KerrGaugeConfig::real_drift(double nonlinearity) {
  // -B1 g1 = -k Im(beta alpha) alpha with B1 = sqrt(-i k) alpha, and the
  // mirror condition for beta.
  const Complex s1 = std::sqrt(nonlinearity) * principal_sqrt(kI);
  const Complex s2 = -std::sqrt(nonlinearity) * principal_sqrt(-kI);
  KerrGaugeConfig g;
  g.kind = Kind::custom;
  g.g1 = [s1](Complex a, Complex b) { return s1 * (b * a).imag(); };
  g.g2 = [s2](Complex a, Complex b) { return s2 * (b * a).imag(); };
  return g;
}

SdeProblem kerr_problem(double omega, double n_mean, const KerrGaugeConfig& gauge,
                        double nonlinearity) {
  if (!(n_mean > 0.0)) throw ConfigError("n_mean", "must be positive");
  if (nonlinearity < 0.0) throw ConfigError("nonlinearity", "must be non-negative");
  if (gauge.kind == KerrGaugeConfig::Kind::custom && (!gauge.g1 || !gauge.g2)) {
    throw ConfigError("gauge", "custom gauge needs both g1 and g2");
  }
  const double k = nonlinearity;
  SdeProblem p;
  p.dimension = 2;
  p.drift = [omega, k](ConstState s, MutState out) {
    const Complex phase = k * (s[1] * s[0]) + omega;
    out[0] = -kI * phase * s[0];
    out[1] = kI * phase * s[1];
  };
  if (k > 0.0) {
    p.n_noise = 2;
    const Complex b1 = principal_sqrt(-kI * k), b2 = principal_sqrt(kI * k);
    p.diffusion = [b1, b2](ConstState s, ConstState v, MutState out) {
      out[0] = b1 * s[0] * v[0];
      out[1] = b2 * s[1] * v[1];
    };
    if (gauge.kind == KerrGaugeConfig::Kind::custom) {
      p.gauge = [g1 = gauge.g1, g2 = gauge.g2](ConstState s, MutState out) {
        out[0] = g1(s[0], s[1]);
        out[1] = g2(s[0], s[1]);
      };
    }
  }
  return p;
}

Ensemble<PhasePoint> coherent_ensemble(std::span<const Complex> alpha, std::size_t count,
                                       std::uint64_t seed) {
  if (count == 0) throw ConfigError("trajectories", "must be at least 1");
  std::vector<PhasePoint> pts(count, PhasePoint::coherent(alpha));
  return Ensemble<PhasePoint>(std::move(pts), seed);
}

Ensemble<PhasePoint> kerr_initial_ensemble(double n_mean, std::size_t count,
                                           std::uint64_t seed) {
  if (!(n_mean > 0.0)) throw ConfigError("n_mean", "must be positive");
  const Complex a0{std::sqrt(n_mean), 0.0};
  return coherent_ensemble(std::span<const Complex>(&a0, 1), count, seed);
}

SdeProblem time_reverse(const SdeProblem& problem) {
  SdeProblem r = problem;
  r.drift = [d = problem.drift](ConstState s, MutState out) {
    d(s, out);
    for (Complex& z : out) z = -z;
  };
  if (problem.diffusion) {
    r.diffusion = [b = problem.diffusion](ConstState s, ConstState v, MutState out) {
      b(s, v, out);
      for (Complex& z : out) z *= kI;
    };
  }
  if (problem.gauge) {
    r.gauge = [g = problem.gauge](ConstState s, MutState out) {
      g(s, out);
      for (Complex& z : out) z *= kI;
    };
  }
  return r;
}

SdeProblem bose_hubbard_positive_p(const BoseLatticeModel& model, BoseGauge gauge) {
  model.validate();
  const std::size_t m = model.modes;
  const double chi = model.chi;
  auto entries = std::make_shared<const std::vector<SparseEntry>>(nonzeros(model));

  SdeProblem p;
  p.dimension = 2 * m;
  p.drift = [m, chi, entries](ConstState s, MutState out) {
    const auto alpha = s.subspan(0, m), beta = s.subspan(m, m);
    auto da = out.subspan(0, m), db = out.subspan(m, m);
    for (std::size_t j = 0; j < m; ++j) da[j] = db[j] = Complex{};
    for (const auto& e : *entries) {
      da[e.row] += e.value * alpha[e.col];
      db[e.row] += std::conj(e.value) * beta[e.col];
    }
    for (std::size_t j = 0; j < m; ++j) {
      const Complex n = beta[j] * alpha[j];
      da[j] = -kI * (da[j] + 2.0 * chi * n * alpha[j]);
      db[j] = kI * (db[j] + 2.0 * chi * n * beta[j]);
    }
  };
  if (chi != 0.0) {
    p.n_noise = 2 * m;
    const Complex ba = principal_sqrt(Complex{0.0, -2.0 * chi});
    const Complex bb = principal_sqrt(Complex{0.0, 2.0 * chi});
    p.diffusion = [m, ba, bb](ConstState s, ConstState v, MutState out) {
      const auto& kern = kernels::active();
      kern.multiply(s.subspan(0, m), v.subspan(0, m), out.subspan(0, m));
      kern.multiply(s.subspan(m, m), v.subspan(m, m), out.subspan(m, m));
      for (std::size_t j = 0; j < m; ++j) {
        out[j] *= ba;
        out[m + j] *= bb;
      }
    };
    if (gauge == BoseGauge::real_drift) {
      // -B g must equal -+2 chi Im(n_j) times alpha_j / beta_j.
      const Complex ga = 2.0 * chi / ba, gb = -2.0 * chi / bb;
      p.gauge = [m, ga, gb](ConstState s, MutState out) {
        for (std::size_t j = 0; j < m; ++j) {
          const double im = (s[m + j] * s[j]).imag();
          out[j] = ga * im;
          out[m + j] = gb * im;
        }
      };
    }
  }
  return p;
}

SdeProblem bose_hubbard_wigner(const BoseLatticeModel& model) {
  model.validate();
  const std::size_t m = model.modes;
  const double chi = model.chi;
  auto entries = std::make_shared<const std::vector<SparseEntry>>(nonzeros(model));

  SdeProblem p;
  p.dimension = 2 * m;
  p.drift = [m, chi, entries](ConstState s, MutState out) {
    const auto psi = s.subspan(0, m), psi_c = s.subspan(m, m);
    auto dpsi = out.subspan(0, m);
    for (std::size_t j = 0; j < m; ++j) dpsi[j] = Complex{};
    for (const auto& e : *entries) dpsi[e.row] += e.value * psi[e.col];
    for (std::size_t j = 0; j < m; ++j) {
      const double density = (psi_c[j] * psi[j]).real();
      dpsi[j] = -kI * (dpsi[j] + 2.0 * chi * (density - 1.0) * psi[j]);
      out[m + j] = std::conj(dpsi[j]);
    }
  };
  return p;
}

Ensemble<PhasePoint> wigner_ensemble(std::span<const Complex> mean, std::size_t count,
                                     std::uint64_t seed) {
  auto ens = coherent_ensemble(mean, count, seed);
  const std::size_t m = mean.size();
  std::vector<double> eta(2 * m);
  for (std::size_t k = 0; k < count; ++k) {
    ens.streams[k].normal(eta, 0.5);  // variance 1/4 per real component
    auto& p = ens.points[k];
    for (std::size_t j = 0; j < m; ++j) {
      p.alpha()[j] = mean[j] + Complex{eta[2 * j], eta[2 * j + 1]};
      p.beta()[j] = std::conj(p.alpha()[j]);
    }
  }
  return ens;
}

namespace {

void check_mode(const Ensemble<PhasePoint>& ensemble, std::size_t mode) {
  const std::size_t m = ensemble.points.empty() ? 0 : ensemble.points.front().modes();
  if (mode >= m) {
    throw IndexError("mode " + std::to_string(mode) + " out of range " + std::to_string(m));
  }
}

}  // namespace

ObservableEstimate estimate_amplitude(const Ensemble<PhasePoint>& ensemble, std::size_t mode,
                                      int n_sub) {
  check_mode(ensemble, mode);
  return weighted_mean<PhasePoint>(
      ensemble, [mode](const PhasePoint& p) { return p.alpha()[mode]; }, n_sub);
}

ObservableEstimate estimate_amplitude_squared(const Ensemble<PhasePoint>& ensemble,
                                              std::size_t mode, int n_sub) {
  check_mode(ensemble, mode);
  return weighted_mean<PhasePoint>(
      ensemble,
      [mode](const PhasePoint& p) { return p.alpha()[mode] * p.alpha()[mode]; }, n_sub);
}

ObservableEstimate estimate_number(const Ensemble<PhasePoint>& ensemble, std::size_t mode,
                                   Ordering ordering, int n_sub) {
  check_mode(ensemble, mode);
  const double shift = ordering == Ordering::symmetric ? kWignerNumberShift : 0.0;
  return weighted_mean<PhasePoint>(
      ensemble,
      [mode, shift](const PhasePoint& p) { return p.beta()[mode] * p.alpha()[mode] - shift; },
      n_sub);
}

ObservableEstimate estimate_total_number(const Ensemble<PhasePoint>& ensemble,
                                         Ordering ordering, int n_sub) {
  const double shift = ordering == Ordering::symmetric ? kWignerNumberShift : 0.0;
  return weighted_mean<PhasePoint>(
      ensemble,
      [shift](const PhasePoint& p) {
        Complex total{};
        for (std::size_t j = 0; j < p.modes(); ++j) total += p.beta()[j] * p.alpha()[j] - shift;
        return total;
      },
      n_sub);
}

ObservableEstimate estimate_quadrature_variance(const Ensemble<PhasePoint>& ensemble,
                                                std::size_t mode, double theta,
                                                Ordering ordering, int n_sub) {
  check_mode(ensemble, mode);
  const Complex rot = std::polar(1.0, -theta);
  const Complex rot_c = std::conj(rot);
  std::vector<Observable<PhasePoint>> obs;
  obs.push_back([=](const PhasePoint& p) {
    return p.alpha()[mode] * rot + p.beta()[mode] * rot_c;
  });
  if (ordering == Ordering::normal) {
    obs.push_back([=](const PhasePoint& p) {
      const Complex a = p.alpha()[mode], b = p.beta()[mode];
      return a * a * rot * rot + b * b * rot_c * rot_c + 2.0 * b * a + 1.0;
    });
  } else {
    obs.push_back([=](const PhasePoint& p) {
      const Complex x = p.alpha()[mode] * rot + p.beta()[mode] * rot_c;
      return x * x;
    });
  }
  const Combiner variance = [](std::span<const Complex> m) { return m[1] - m[0] * m[0]; };
  return weighted_function<PhasePoint>(ensemble, obs, variance, n_sub);
}

ObservableEstimate estimate_alpha_spread(const Ensemble<PhasePoint>& ensemble,
                                         std::size_t mode, int n_sub) {
  check_mode(ensemble, mode);
  std::vector<Observable<PhasePoint>> obs{
      [mode](const PhasePoint& p) { return p.alpha()[mode]; },
      [mode](const PhasePoint& p) { return Complex{std::norm(p.alpha()[mode]), 0.0}; }};
  const Combiner spread = [](std::span<const Complex> m) {
    return Complex{m[1].real() - std::norm(m[0]), 0.0};
  };
  return weighted_function<PhasePoint>(ensemble, obs, spread, n_sub);
}

ObservableEstimate estimate_g2(const Ensemble<PhasePoint>& ensemble, std::size_t k1,
                               std::size_t k2, int n_sub) {
  check_mode(ensemble, k1);
  check_mode(ensemble, k2);
  std::vector<Observable<PhasePoint>> obs{
      [k1](const PhasePoint& p) { return p.beta()[k1] * p.alpha()[k1]; },
      [k2](const PhasePoint& p) { return p.beta()[k2] * p.alpha()[k2]; },
      [k1, k2](const PhasePoint& p) {
        // beta_1 beta_2 alpha_2 alpha_1; for k1 == k2 this is beta^2 alpha^2.
        return p.beta()[k1] * p.beta()[k2] * p.alpha()[k2] * p.alpha()[k1];
      }};
  const std::vector<Combiner> combiners{
      [](std::span<const Complex> m) { return m[2] / (m[0] * m[1]); },
      [](std::span<const Complex> m) { return m[0]; },
      [](std::span<const Complex> m) { return m[1]; }};
  auto est = weighted_functions<PhasePoint>(ensemble, obs, combiners, n_sub);
  ObservableEstimate g2 = est[0];
  for (std::size_t d = 1; d <= 2; ++d) {
    if (std::abs(est[d].mean) <= 3.0 * est[d].std_error) g2.reliable = false;
  }
  return g2;
}

ObservableEstimate estimate_g1(const Ensemble<PhasePoint>& ensemble, std::size_t k1,
                               std::size_t k2, int n_sub) {
  check_mode(ensemble, k1);
  check_mode(ensemble, k2);
  std::vector<Observable<PhasePoint>> obs{
      [k1](const PhasePoint& p) { return p.beta()[k1] * p.alpha()[k1]; },
      [k2](const PhasePoint& p) { return p.beta()[k2] * p.alpha()[k2]; },
      [k1, k2](const PhasePoint& p) { return p.beta()[k1] * p.alpha()[k2]; }};
  const std::vector<Combiner> combiners{
      [](std::span<const Complex> m) { return m[2] / std::sqrt(m[0] * m[1]); },
      [](std::span<const Complex> m) { return m[0]; },
      [](std::span<const Complex> m) { return m[1]; }};
  auto est = weighted_functions<PhasePoint>(ensemble, obs, combiners, n_sub);
  ObservableEstimate g1 = est[0];
  for (std::size_t d = 1; d <= 2; ++d) {
    if (std::abs(est[d].mean) <= 3.0 * est[d].std_error) g1.reliable = false;
  }
  return g1;
}

}  // namespace phasespace
