#include "phasespace/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "phasespace/kernels.hpp"

namespace phasespace {

namespace {

constexpr double kPi = std::numbers::pi;

double centre(std::size_t modes) { return 0.5 * static_cast<double>(modes - 1); }

double total_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (Complex z : v) s += std::norm(z);
  return s;
}

void apply_linear(const BoseLatticeModel& model, std::span<const Complex> psi,
                  std::span<Complex> out) {
  kernels::active().matvec(model.modes, model.modes, model.omega.data(), psi.data(), out.data());
}

}  // namespace

BoseLatticeModel collision_model(std::size_t modes, double hopping, double chi) {
  if (modes < 3) throw ConfigError("modes", "collision ring needs at least 3 sites");
  return BoseLatticeModel::chain(modes, hopping, chi, 2.0 * hopping, true);
}

std::vector<double> harmonic_potential(std::size_t modes, double curvature) {
  std::vector<double> v(modes);
  const double c = centre(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    const double x = static_cast<double>(j) - c;
    v[j] = 0.5 * curvature * x * x;
  }
  return v;
}

std::vector<Complex> gp_ground_state(const BoseLatticeModel& model,
                                     std::span<const double> potential, double atoms,
                                     const GroundStateOptions& options) {
  model.validate();
  const std::size_t m = model.modes;
  if (potential.size() != m) throw PreconditionError("gp_ground_state: potential size");
  if (!(atoms > 0.0)) throw PreconditionError("gp_ground_state: atoms must be positive");

  // Gaussian start centred in the trap.
  std::vector<Complex> psi(m), h(m);
  const double c = centre(m);
  const double width = std::max(1.0, static_cast<double>(m) / 8.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = (static_cast<double>(j) - c) / width;
    psi[j] = std::exp(-0.5 * x * x);
  }
  auto normalize = [&] {
    const double s = std::sqrt(atoms / total_norm(psi));
    for (auto& z : psi) z *= s;
  };
  normalize();

  double row_bound = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < m; ++j) r += std::abs(model.coupling(i, j));
    row_bound = std::max(row_bound, r + potential[i]);
  }
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    apply_linear(model, psi, h);
    double peak = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      h[j] += (potential[j] + 2.0 * model.chi * std::norm(psi[j])) * psi[j];
      peak = std::max(peak, std::norm(psi[j]));
    }
    Complex num{};
    for (std::size_t j = 0; j < m; ++j) num += std::conj(psi[j]) * h[j];
    const double mu = num.real() / atoms;
    // Converged when psi is an eigenvector of the GP operator: the residual
    // h - mu psi, not just the change in mu, must be small.
    double residual = 0.0;
    for (std::size_t j = 0; j < m; ++j) residual += std::norm(h[j] - mu * psi[j]);
    if (std::sqrt(residual / atoms) <= options.tolerance * std::max(1.0, std::abs(mu))) break;
    const double step = 0.5 / (row_bound + 2.0 * model.chi * peak);
    for (std::size_t j = 0; j < m; ++j) psi[j] -= step * h[j];
    normalize();
  }
  for (auto& z : psi) z = std::abs(z);
  return psi;
}

double lattice_momentum(std::size_t index, std::size_t modes) {
  const auto n = static_cast<double>(index);
  const auto mm = static_cast<double>(modes);
  double k = 2.0 * kPi * n / mm;
  if (k >= kPi) k -= 2.0 * kPi;
  return k;
}

std::size_t momentum_index(double k, std::size_t modes) {
  const auto mm = static_cast<double>(modes);
  long n = std::lround(k * mm / (2.0 * kPi));
  n %= static_cast<long>(modes);
  if (n < 0) n += static_cast<long>(modes);
  return static_cast<std::size_t>(n);
}

std::size_t opposite_momentum(std::size_t index, std::size_t modes) {
  return (modes - index % modes) % modes;
}

std::vector<Complex> collision_mean_field(std::span<const Complex> gp_profile, double vQ,
                                          double vs, double seed_fraction) {
  if (!(seed_fraction >= 0.0 && seed_fraction < 1.0)) {
    throw ConfigError("seed_fraction", "must lie in [0, 1)");
  }
  if (!(std::abs(vQ) < kPi)) throw ConfigError("vQ", "momentum at or beyond the Nyquist limit pi");
  if (!(std::abs(vs) < kPi)) throw ConfigError("vs", "momentum at or beyond the Nyquist limit pi");
  const std::size_t m = gp_profile.size();
  const double c = centre(m);
  const double a = std::sqrt(0.5 * (1.0 - seed_fraction));
  const double b = std::sqrt(seed_fraction);
  std::vector<Complex> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = static_cast<double>(j) - c;
    const Complex f = a * (std::polar(1.0, vQ * x) + std::polar(1.0, -vQ * x)) +
                      b * std::polar(1.0, -vs * x);
    out[j] = gp_profile[j] * f;
  }
  const double target = total_norm(gp_profile);
  const double have = total_norm(out);
  if (have > 0.0) {
    const double s = std::sqrt(target / have);
    for (auto& z : out) z *= s;
  }
  return out;
}

Ensemble<PhasePoint> init_collision_state(const BoseLatticeModel& model,
                                          std::span<const Complex> gp_profile, double vQ,
                                          double vs, double seed_fraction,
                                          std::size_t count, std::uint64_t seed) {
  model.validate();
  if (gp_profile.size() != model.modes) {
    throw PreconditionError("init_collision_state: profile length differs from mode count");
  }
  const auto mean = collision_mean_field(gp_profile, vQ, vs, seed_fraction);
  return coherent_ensemble(mean, count, seed);
}

Ensemble<PhasePoint> to_momentum(const Ensemble<PhasePoint>& ensemble) {
  Ensemble<PhasePoint> out = ensemble;
  if (ensemble.points.empty()) return out;
  const std::size_t m = ensemble.points.front().modes();
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<Complex> fwd(m * m), bwd(m * m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t x = 0; x < m; ++x) {
      // Integer phase index keeps the table exact to rounding of one polar().
      const double ang = 2.0 * kPi * static_cast<double>((k * x) % m) / static_cast<double>(m);
      fwd[k * m + x] = std::polar(norm, -ang);
      bwd[k * m + x] = std::polar(norm, ang);
    }
  }
  const auto& kt = kernels::active();
  for (std::size_t t = 0; t < ensemble.points.size(); ++t) {
    const auto& src = ensemble.points[t];
    auto& dst = out.points[t];
    kt.matvec(m, m, fwd.data(), src.alpha().data(), dst.alpha().data());
    kt.matvec(m, m, bwd.data(), src.beta().data(), dst.beta().data());
  }
  return out;
}

std::vector<PairCorrelation> pair_table(const Ensemble<PhasePoint>& momentum_ensemble,
                                        std::span<const std::size_t> modes, int n_sub) {
  std::vector<PairCorrelation> out;
  if (momentum_ensemble.points.empty()) return out;
  const std::size_t m = momentum_ensemble.points.front().modes();
  for (std::size_t k : modes) {
    if (k >= m) throw IndexError("pair_table: momentum index " + std::to_string(k));
    PairCorrelation row;
    row.k = k;
    row.minus_k = opposite_momentum(k, m);
    row.momentum = lattice_momentum(k, m);
    row.density = estimate_number(momentum_ensemble, k, Ordering::normal, n_sub);
    row.density_minus = estimate_number(momentum_ensemble, row.minus_k, Ordering::normal, n_sub);
    row.g2_same = estimate_g2(momentum_ensemble, k, k, n_sub);
    row.g2_opposite = estimate_g2(momentum_ensemble, k, row.minus_k, n_sub);
    row.g1_opposite = estimate_g1(momentum_ensemble, k, row.minus_k, n_sub);
    const Complex amp = estimate_amplitude(momentum_ensemble, k, n_sub).mean;
    const double n = row.density.mean.real();
    row.coherent_fraction = n > 0.0 ? std::norm(amp) / n : 0.0;
    out.push_back(row);
  }
  return out;
}

}  // namespace phasespace
