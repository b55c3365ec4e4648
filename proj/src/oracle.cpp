#include "phasespace/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "phasespace/fermion.hpp"

namespace phasespace::oracle {

namespace {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
const Complex kI{0.0, 1.0};

void enumerate(std::size_t modes, std::size_t remaining, std::vector<std::uint16_t>& occ,
               std::size_t pos, std::vector<std::vector<std::uint16_t>>& out) {
  if (pos + 1 == modes) {
    occ[pos] = static_cast<std::uint16_t>(remaining);
    out.push_back(occ);
    return;
  }
  for (std::size_t k = remaining + 1; k-- > 0;) {
    occ[pos] = static_cast<std::uint16_t>(k);
    enumerate(modes, remaining - k, occ, pos + 1, out);
  }
}

}  // namespace

FockBasisBoson::FockBasisBoson(std::size_t modes, std::size_t n_max)
    : modes_(modes), n_max_(n_max) {
  if (modes == 0) throw SizeError("FockBasisBoson: need at least one mode");
  if (n_max > 65535) throw SizeError("FockBasisBoson: cutoff too large");
  binom_.assign(n_max + modes + 1, std::vector<std::size_t>(modes + 1, 0));
  for (std::size_t n = 0; n < binom_.size(); ++n) {
    binom_[n][0] = 1;
    for (std::size_t k = 1; k <= std::min(n, modes); ++k) {
      binom_[n][k] = binom_[n - 1][k - 1] + (k <= n - 1 ? binom_[n - 1][k] : 0);
    }
  }
  sectors_.resize(n_max + 1);
  std::vector<std::uint16_t> occ(modes);
  for (std::size_t n = 0; n <= n_max; ++n) enumerate(modes, n, occ, 0, sectors_[n]);
}

std::size_t FockBasisBoson::dimension() const {
  std::size_t d = 0;
  for (const auto& s : sectors_) d += s.size();
  return d;
}

// Sectors are enumerated in descending lexicographic order; the rank of an
// occupation vector follows from counting the vectors that precede it.
std::size_t FockBasisBoson::index(std::span<const std::uint16_t> occupation) const {
  std::size_t remaining = 0;
  for (auto v : occupation) remaining += v;
  std::size_t idx = 0;
  for (std::size_t pos = 0; pos + 1 < modes_; ++pos) {
    const std::size_t rest_modes = modes_ - pos - 1;
    // vectors with a larger value at `pos`: value k in (occ, remaining]
    for (std::size_t k = occupation[pos] + 1; k <= remaining; ++k) {
      const std::size_t r = remaining - k;  // compositions of r into rest_modes parts
      idx += binom_[r + rest_modes - 1][rest_modes - 1];
    }
    remaining -= occupation[pos];
  }
  return idx;
}

std::size_t coherent_cutoff(double n_mean) {
  return static_cast<std::size_t>(std::ceil(n_mean + 8.0 * std::sqrt(n_mean) + 10.0));
}

double BoseMoments::g2(std::size_t i, std::size_t j) const {
  return pair[i * modes() + j] / (number_moment(i, i).real() * number_moment(j, j).real());
}

Complex kerr_amplitude(Complex alpha, double omega, double chi, double t) {
  const double n = std::norm(alpha);
  return alpha * std::exp(-kI * omega * t + n * (std::exp(-2.0 * kI * chi * t) - 1.0));
}

Complex kerr_amplitude_squared(Complex alpha, double omega, double chi, double t) {
  const double n = std::norm(alpha);
  return alpha * alpha *
         std::exp(-2.0 * kI * (omega + chi) * t + n * (std::exp(-4.0 * kI * chi * t) - 1.0));
}

double kerr_quadrature_variance(Complex alpha, double omega, double chi, double t,
                                double theta) {
  const Complex rot = std::polar(1.0, -theta);
  const Complex a = kerr_amplitude(alpha, omega, chi, t);
  const Complex a2 = kerr_amplitude_squared(alpha, omega, chi, t);
  const double mean = 2.0 * (a * rot).real();
  return 1.0 + 2.0 * std::norm(alpha) + 2.0 * (a2 * rot * rot).real() - mean * mean;
}

BoseOracleResult ed_bose_evolve(const BoseLatticeModel& model, std::span<const Complex> alpha,
                                std::span<const double> times,
                                const BoseOracleOptions& options) {
  model.validate();
  const std::size_t m = model.modes;
  if (alpha.size() != m) throw PreconditionError("ed_bose_evolve: alpha needs one entry per mode");

  double n_mean = 0.0;
  for (Complex a : alpha) n_mean += std::norm(a);
  const std::size_t n_max = options.n_max > 0 ? options.n_max : coherent_cutoff(n_mean);

  // Poisson tail of the total number beyond the cutoff.
  double kept = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    kept += std::exp(-n_mean + static_cast<double>(n) * std::log(std::max(n_mean, 1e-300)) -
                     std::lgamma(static_cast<double>(n) + 1.0));
  }
  if (n_mean == 0.0) kept = 1.0;
  const double deficit = std::max(0.0, 1.0 - kept);
  if (deficit > options.max_norm_deficit) {
    throw CutoffError("ed_bose_evolve: cutoff " + std::to_string(n_max) + " loses norm " +
                      std::to_string(deficit));
  }

  // Size check before enumerating anything.
  {
    double total = 0.0, largest = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
      const double d = std::exp(std::lgamma(double(n + m)) - std::lgamma(double(n + 1)) -
                                std::lgamma(double(m)));
      total += d;
      largest = std::max(largest, d);
    }
    if (total > double(options.max_dimension) || largest > double(options.max_sector_dimension)) {
      throw SizeError("ed_bose_evolve: Hilbert space too large for dense diagonalization");
    }
  }

  const FockBasisBoson basis(m, n_max);
  BoseOracleResult result;
  result.norm_deficit = deficit;
  result.n_max = n_max;
  result.dimension = basis.dimension();

  // Per sector: eigenbasis and coherent-state coefficients in it.
  struct Sector {
    Eigen::VectorXd energies;
    CMatrix vectors;
    CVector coeff_eigen;  // V^dag c
  };
  std::vector<Sector> sectors(n_max + 1);
  std::vector<double> log_abs(m), phase(m);
  for (std::size_t j = 0; j < m; ++j) {
    log_abs[j] = std::abs(alpha[j]) > 0 ? std::log(std::abs(alpha[j])) : 0.0;
    phase[j] = std::arg(alpha[j]);
  }
  for (std::size_t n = 0; n <= n_max; ++n) {
    const auto& states = basis.sector(n);
    const auto dim = static_cast<Eigen::Index>(states.size());
    CMatrix h = CMatrix::Zero(dim, dim);
    CVector c(dim);
    std::vector<std::uint16_t> occ(m);
    for (Eigen::Index s = 0; s < dim; ++s) {
      const auto& st = states[static_cast<std::size_t>(s)];
      double lg = -0.5 * n_mean, ph = 0.0;
      bool zero = false;
      for (std::size_t j = 0; j < m; ++j) {
        if (st[j] > 0 && alpha[j] == Complex{}) zero = true;
        lg += st[j] * log_abs[j] - 0.5 * std::lgamma(st[j] + 1.0);
        ph += st[j] * phase[j];
        h(s, s) += model.chi * double(st[j]) * double(st[j] > 0 ? st[j] - 1 : 0);
      }
      c(s) = zero ? Complex{} : std::polar(std::exp(lg), ph);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const Complex w = model.coupling(i, j);
          if (w == Complex{}) continue;
          if (i == j) {
            h(s, s) += w * double(st[j]);
            continue;
          }
          if (st[j] == 0) continue;
          occ.assign(st.begin(), st.end());
          const double amp = std::sqrt(double(st[j]) * double(st[i] + 1));
          occ[j]--;
          occ[i]++;
          const auto t = static_cast<Eigen::Index>(basis.index(occ));
          h(t, s) += w * amp;
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    sectors[n] = {eig.eigenvalues(), eig.eigenvectors(), eig.eigenvectors().adjoint() * c};
  }

  for (double t : times) {
    BoseMoments mom;
    mom.time = t;
    mom.a.assign(m, Complex{});
    mom.a2.assign(m, Complex{});
    mom.adag_a.assign(m * m, Complex{});
    mom.pair.assign(m * m, 0.0);

    std::vector<CVector> psi(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
      const auto& sec = sectors[n];
      CVector rotated = sec.coeff_eigen;
      for (Eigen::Index k = 0; k < rotated.size(); ++k) {
        rotated(k) *= std::exp(-kI * sec.energies(k) * t);
      }
      psi[n] = sec.vectors * rotated;
    }

    std::vector<std::uint16_t> occ(m);
    for (std::size_t n = 0; n <= n_max; ++n) {
      const auto& states = basis.sector(n);
      for (std::size_t s = 0; s < states.size(); ++s) {
        const auto& st = states[s];
        const Complex amp = psi[n](static_cast<Eigen::Index>(s));
        const double p = std::norm(amp);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < m; ++j) {
            mom.pair[i * m + j] += p * (i == j ? double(st[i]) * (double(st[i]) - 1.0)
                                               : double(st[i]) * double(st[j]));
            if (i == j) {
              mom.adag_a[i * m + i] += p * double(st[i]);
            } else if (st[j] > 0) {
              // <psi| a_i^dag a_j |psi>: a_i^dag a_j maps st to st - e_j + e_i
              occ.assign(st.begin(), st.end());
              occ[j]--;
              occ[i]++;
              const auto t_idx = static_cast<Eigen::Index>(basis.index(occ));
              mom.adag_a[i * m + j] += std::conj(psi[n](t_idx)) * amp *
                                       std::sqrt(double(st[j]) * double(st[i] + 1));
            }
          }
        }
        // <a_j>: a_j maps sector n to n - 1; <a_j a_j>: n to n - 2
        for (std::size_t j = 0; j < m; ++j) {
          if (st[j] >= 1) {
            occ.assign(st.begin(), st.end());
            occ[j]--;
            const auto t_idx = static_cast<Eigen::Index>(basis.index(occ));
            mom.a[j] += std::conj(psi[n - 1](t_idx)) * amp * std::sqrt(double(st[j]));
          }
          if (st[j] >= 2) {
            occ.assign(st.begin(), st.end());
            occ[j] -= 2;
            const auto t_idx = static_cast<Eigen::Index>(basis.index(occ));
            mom.a2[j] += std::conj(psi[n - 2](t_idx)) * amp *
                         std::sqrt(double(st[j]) * double(st[j] - 1));
          }
        }
      }
    }
    result.moments.push_back(std::move(mom));
  }
  return result;
}

FockBasisFermi::FockBasisFermi(std::size_t sites) : sites_(sites) {
  if (sites == 0) throw SizeError("FockBasisFermi: need at least one site");
  if (sites > 9) throw SizeError("FockBasisFermi: 4^M exceeds 10^6 for M > 9");
}

bool FockBasisFermi::hop(std::uint32_t state, std::size_t p, std::size_t q, std::uint32_t& out,
                         int& sign) {
  const std::uint32_t bq = 1u << q, bp = 1u << p;
  if (!(state & bq)) return false;
  std::uint32_t s = state;
  int parity = std::popcount(s & (bq - 1));
  s &= ~bq;
  if (s & bp) return false;
  parity += std::popcount(s & (bp - 1));
  s |= bp;
  out = s;
  sign = parity % 2 == 0 ? 1 : -1;
  return true;
}

namespace {

struct SectorKey {
  int up, down;
  auto operator<=>(const SectorKey&) const = default;
};

}  // namespace

std::vector<FermiThermal> ed_fermi_thermal(const FermiHubbardModel& model,
                                           std::span<const double> taus) {
  model.validate(true);
  const FockBasisFermi basis(model.sites);
  const std::size_t m = model.sites;

  std::uint32_t up_mask = 0;
  for (std::size_t j = 0; j < m; ++j) up_mask |= 1u << FockBasisFermi::mode(j, 0);

  std::map<SectorKey, std::vector<std::uint32_t>> sectors;
  for (std::uint32_t s = 0; s < basis.dimension(); ++s) {
    sectors[{std::popcount(s & up_mask), std::popcount(s & ~up_mask)}].push_back(s);
  }

  // Eigen-decompose H in each sector; observables are diagonal in the
  // occupation basis so only |V_sn|^2 is needed.
  struct Level {
    double energy;     // eigenvalue of H
    double particles;  // N of the sector
    std::vector<double> n_up, n_down;
    double double_occ;
  };
  std::vector<Level> levels;
  for (const auto& [key, states] : sectors) {
    const auto dim = static_cast<Eigen::Index>(states.size());
    std::map<std::uint32_t, Eigen::Index> where;
    for (Eigen::Index k = 0; k < dim; ++k) where[states[static_cast<std::size_t>(k)]] = k;
    RMatrix h = RMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const std::uint32_t s = states[static_cast<std::size_t>(k)];
      for (std::size_t j = 0; j < m; ++j) {
        const bool u = s & (1u << FockBasisFermi::mode(j, 0));
        const bool d = s & (1u << FockBasisFermi::mode(j, 1));
        if (u && d) h(k, k) += model.U;
      }
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const double t = model.hopping(i, j);
          if (t == 0.0) continue;
          for (int spin = 0; spin < 2; ++spin) {
            std::uint32_t out = 0;
            int sign = 0;
            if (FockBasisFermi::hop(s, FockBasisFermi::mode(i, spin), FockBasisFermi::mode(j, spin),
                                    out, sign)) {
              h(where.at(out), k) -= t * sign;
            }
          }
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(h);
    for (Eigen::Index n = 0; n < dim; ++n) {
      Level lv{eig.eigenvalues()(n), double(key.up + key.down), std::vector<double>(m, 0.0),
               std::vector<double>(m, 0.0), 0.0};
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double p = eig.eigenvectors()(k, n) * eig.eigenvectors()(k, n);
        const std::uint32_t s = states[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j < m; ++j) {
          const bool u = s & (1u << FockBasisFermi::mode(j, 0));
          const bool d = s & (1u << FockBasisFermi::mode(j, 1));
          if (u) lv.n_up[j] += p;
          if (d) lv.n_down[j] += p;
          if (u && d) lv.double_occ += p / double(m);
        }
      }
      levels.push_back(std::move(lv));
    }
  }

  std::vector<FermiThermal> out;
  for (double tau : taus) {
    double lowest = INFINITY;
    for (const auto& lv : levels) lowest = std::min(lowest, tau * (lv.energy - model.mu * lv.particles));
    FermiThermal th;
    th.tau = tau;
    th.density_up.assign(m, 0.0);
    th.density_down.assign(m, 0.0);
    double z = 0.0;
    for (const auto& lv : levels) {
      const double w = std::exp(-(tau * (lv.energy - model.mu * lv.particles) - lowest));
      z += w;
      th.energy += w * lv.energy;
      th.double_occupancy += w * lv.double_occ;
      for (std::size_t j = 0; j < m; ++j) {
        th.density_up[j] += w * lv.n_up[j];
        th.density_down[j] += w * lv.n_down[j];
      }
    }
    th.energy /= z;
    th.double_occupancy /= z;
    for (std::size_t j = 0; j < m; ++j) {
      th.density_up[j] /= z;
      th.density_down[j] /= z;
    }
    out.push_back(std::move(th));
  }
  return out;
}

std::vector<FermiThermal> free_fermion_thermal(const FermiHubbardModel& model,
                                               std::span<const double> taus) {
  model.validate(true);
  if (model.U != 0.0) throw PreconditionError("free_fermion_thermal: requires U = 0");
  const std::size_t m = model.sites;
  RMatrix h(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) h(Eigen::Index(i), Eigen::Index(j)) = -model.hopping(i, j);
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(h);
  std::vector<FermiThermal> out;
  for (double tau : taus) {
    FermiThermal th;
    th.tau = tau;
    th.density_up.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double e = eig.eigenvalues()(Eigen::Index(k));
      const double f = 1.0 / (std::exp(tau * (e - model.mu)) + 1.0);
      th.energy += 2.0 * e * f;
      for (std::size_t j = 0; j < m; ++j) {
        const double v = eig.eigenvectors()(Eigen::Index(j), Eigen::Index(k));
        th.density_up[j] += v * v * f;
      }
    }
    th.density_down = th.density_up;
    for (std::size_t j = 0; j < m; ++j) {
      th.double_occupancy += th.density_up[j] * th.density_down[j] / double(m);
    }
    out.push_back(std::move(th));
  }
  return out;
}

}  // namespace phasespace::oracle
