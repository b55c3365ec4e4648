#pragma once

// Exact-diagonalization references for small bosonic and fermionic systems.

#include <cstdint>
#include <span>
#include <vector>

#include "phasespace/boson.hpp"
#include "phasespace/common.hpp"

namespace phasespace {

struct FermiHubbardModel;

namespace oracle {

/// Occupation-number basis of M bosonic modes, organised in sectors of fixed
/// total number N = 0..n_max (the Hamiltonian conserves N).
class FockBasisBoson {
 public:
  FockBasisBoson(std::size_t modes, std::size_t n_max);

  std::size_t modes() const { return modes_; }
  std::size_t n_max() const { return n_max_; }
  std::size_t dimension() const;
  const std::vector<std::vector<std::uint16_t>>& sector(std::size_t n) const {
    return sectors_.at(n);
  }
  /// Position of an occupation vector inside its sector.
  std::size_t index(std::span<const std::uint16_t> occupation) const;

 private:
  std::size_t modes_, n_max_;
  std::vector<std::vector<std::vector<std::uint16_t>>> sectors_;
  std::vector<std::vector<std::size_t>> binom_;  // binom_[n][k]
};

/// Smallest total-number cutoff satisfying n >= n + 8 sqrt(n) + 10 for
/// mean total occupation `n_mean`.
std::size_t coherent_cutoff(double n_mean);

struct BoseMoments {
  double time = 0.0;
  std::vector<Complex> a;       // <a_j>
  std::vector<Complex> a2;      // <a_j a_j>
  std::vector<Complex> adag_a;  // <a_i^dag a_j>, row-major
  std::vector<double> pair;     // <a_i^dag a_j^dag a_j a_i>, row-major

  std::size_t modes() const { return a.size(); }
  Complex number_moment(std::size_t i, std::size_t j) const { return adag_a[i * modes() + j]; }
  double g2(std::size_t i, std::size_t j) const;
};

struct BoseOracleResult {
  std::vector<BoseMoments> moments;
  double norm_deficit = 0.0;  // coherent-state weight beyond the cutoff
  std::size_t n_max = 0;
  std::size_t dimension = 0;
};

struct BoseOracleOptions {
  std::size_t n_max = 0;  // 0: coherent_cutoff(sum |alpha|^2)
  double max_norm_deficit = 1e-10;
  std::size_t max_dimension = 1'000'000;
  std::size_t max_sector_dimension = 6000;
};

/// Moments of a coherent initial state evolved under the truncated
/// Bose-Hubbard Hamiltonian by eigendecomposition of each number sector.
BoseOracleResult ed_bose_evolve(const BoseLatticeModel& model, std::span<const Complex> alpha,
                                std::span<const double> times,
                                const BoseOracleOptions& options = {});

/// Closed-form single-mode Kerr amplitude for H = omega n + chi a^dag a^dag a a:
/// <a(t)> = alpha e^{-i omega t} exp(|alpha|^2 (e^{-2 i chi t} - 1)).
Complex kerr_amplitude(Complex alpha, double omega, double chi, double t);

/// <a(t)^2> = alpha^2 e^{-2 i (omega + chi) t} exp(|alpha|^2 (e^{-4 i chi t} - 1)).
Complex kerr_amplitude_squared(Complex alpha, double omega, double chi, double t);

/// Var(X_theta) of the exact Kerr state.
double kerr_quadrature_variance(Complex alpha, double omega, double chi, double t,
                                double theta);

/// All 4^M configurations of M spinful sites, bit p = 2 j + s for site j and
/// spin s (0 up, 1 down); creation operators act in ascending mode order so a
///^dag_p picks up (-1)^(number of occupied modes below p).
class FockBasisFermi {
 public:
  explicit FockBasisFermi(std::size_t sites);

  std::size_t sites() const { return sites_; }
  std::size_t dimension() const { return std::size_t{1} << (2 * sites_); }

  static constexpr std::size_t mode(std::size_t site, int spin) { return 2 * site + static_cast<std::size_t>(spin); }

  /// Applies a_p^dag a_q to `state`; returns false when the result vanishes.
  static bool hop(std::uint32_t state, std::size_t p, std::size_t q, std::uint32_t& out,
                  int& sign);

 private:
  std::size_t sites_;
};

struct FermiThermal {
  double tau = 0.0;
  std::vector<double> density_up;    // <n_{j up}>
  std::vector<double> density_down;  // <n_{j down}>
  double double_occupancy = 0.0;     // (1/M) sum_j <n_{j down} n_{j up}>
  double energy = 0.0;               // <H>, excluding -mu N
};

/// Grand-canonical traces Tr[e^{-tau (H - mu N)} O] / Tr[e^{-tau (H - mu N)}]
/// by full diagonalization of every (N_up, N_down) sector.
std::vector<FermiThermal> ed_fermi_thermal(const FermiHubbardModel& model,
                                           std::span<const double> taus);

/// U = 0 reference from single-particle eigenmodes and Fermi functions.
std::vector<FermiThermal> free_fermion_thermal(const FermiHubbardModel& model,
                                               std::span<const double> taus);

}  // namespace oracle
}  // namespace phasespace
