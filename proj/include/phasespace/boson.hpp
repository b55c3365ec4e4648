#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "phasespace/ensemble.hpp"
#include "phasespace/estimate.hpp"
#include "phasespace/sde.hpp"

namespace phasespace {

/// H = sum_ij omega_ij a_i^dag a_j + chi sum_j a_j^dag a_j^dag a_j a_j (hbar = 1).
/// The chemical potential, if any, sits on the diagonal of omega.
struct BoseLatticeModel {
  std::size_t modes = 0;
  std::vector<Complex> omega;  // row-major modes x modes
  double chi = 0.0;

  Complex coupling(std::size_t i, std::size_t j) const { return omega[i * modes + j]; }
  void validate() const;

  static BoseLatticeModel single_mode(double frequency, double chi);
  /// Nearest-neighbour tight binding, omega_jj = onsite, omega_{j,j+-1} = -hopping.
  static BoseLatticeModel chain(std::size_t modes, double hopping, double chi,
                                double onsite = 0.0, bool periodic = false);
};

/// Stochastic gauge for the single-mode problem: g1 multiplies the alpha
/// noise, g2 the beta noise.
struct KerrGaugeConfig {
  enum class Kind { none, custom };
  Kind kind = Kind::none;
  std::function<Complex(Complex alpha, Complex beta)> g1;
  std::function<Complex(Complex alpha, Complex beta)> g2;

  static KerrGaugeConfig none() { return {}; }
  /// Drift gauge turning the beta*alpha drift into Re[beta*alpha], i.e. the
  /// single-mode equations in their commonly published form.
  static KerrGaugeConfig real_drift(double nonlinearity = 1.0);
};

/// Single-mode Kerr oscillator in scaled time tau = 2 chi t:
///
///   d alpha = -i (k beta alpha + omega) alpha dtau + sqrt(-i k) alpha dW1
///   d beta  =  i (k beta alpha + omega) beta  dtau + sqrt( i k) beta  dW2
///
/// k = `nonlinearity` (1 for the physical problem, 0 switches off both the
/// interaction drift and the noise). Principal square-root branches.
SdeProblem kerr_problem(double omega, double n_mean, const KerrGaugeConfig& gauge,
                        double nonlinearity = 1.0);

/// alpha(0) = beta(0)* = sqrt(n_mean) for every trajectory.
Ensemble<PhasePoint> kerr_initial_ensemble(double n_mean, std::size_t count,
                                           std::uint64_t seed);

/// Every trajectory starts at the same coherent point.
Ensemble<PhasePoint> coherent_ensemble(std::span<const Complex> alpha, std::size_t count,
                                       std::uint64_t seed);

/// Flips the sign of the Hamiltonian: drift A -> -A, diffusion B -> iB
/// (same noise magnitudes, diffusion matrix BB^T -> -BB^T), gauge g -> ig so
/// the gauged drift A - Bg is negated as a whole. Weight drift unchanged.
SdeProblem time_reverse(const SdeProblem& problem);

enum class BoseGauge {
  none,
  // Drift gauge replacing n_j = beta_j alpha_j by Re(n_j) in the nonlinear
  // drift, the multimode form of KerrGaugeConfig::real_drift. Suppresses the
  // escaping trajectories of the ungauged equations at the cost of complex
  // weights.
  real_drift,
};

/// Positive-P mapping of the Bose-Hubbard Hamiltonian on 2M amplitudes
/// (alpha then beta) with 2M multiplicative noises sqrt(-+2i chi).
SdeProblem bose_hubbard_positive_p(const BoseLatticeModel& model,
                                   BoseGauge gauge = BoseGauge::none);

/// Truncated-Wigner mean-field drift
///   d psi_j = -i (sum_k omega_jk psi_k + 2 chi (|psi_j|^2 - 1) psi_j) dt.
/// Third-order terms are dropped, so results are approximate. The state
/// keeps beta = conj(alpha) exactly.
SdeProblem bose_hubbard_wigner(const BoseLatticeModel& model);

/// Coherent mean field plus complex vacuum noise with <|eta|^2> = 1/2 per
/// mode, drawn from each trajectory's own stream.
Ensemble<PhasePoint> wigner_ensemble(std::span<const Complex> mean, std::size_t count,
                                     std::uint64_t seed);

/// Symmetric-to-normal ordering correction for <a^dag a>.
inline constexpr double kWignerNumberShift = 0.5;

enum class Ordering {
  normal,     // positive-P: moments read off directly
  symmetric,  // Wigner: moments are symmetrically ordered
};

ObservableEstimate estimate_amplitude(const Ensemble<PhasePoint>& ensemble, std::size_t mode,
                                      int n_sub = kDefaultSubensembles);

/// <a_j^2>; identical expression in both orderings.
ObservableEstimate estimate_amplitude_squared(const Ensemble<PhasePoint>& ensemble,
                                              std::size_t mode,
                                              int n_sub = kDefaultSubensembles);

/// Normally ordered <a_j^dag a_j> for either ordering.
ObservableEstimate estimate_number(const Ensemble<PhasePoint>& ensemble, std::size_t mode,
                                   Ordering ordering, int n_sub = kDefaultSubensembles);

/// Sum over modes of the normally ordered occupation.
ObservableEstimate estimate_total_number(const Ensemble<PhasePoint>& ensemble,
                                         Ordering ordering,
                                         int n_sub = kDefaultSubensembles);

/// Var(X_theta) for X_theta = a e^{-i theta} + a^dag e^{i theta}.
ObservableEstimate estimate_quadrature_variance(const Ensemble<PhasePoint>& ensemble,
                                                std::size_t mode, double theta,
                                                Ordering ordering,
                                                int n_sub = kDefaultSubensembles);

/// Ensemble variance of alpha across alive trajectories (unweighted), the
/// phase-space spread of the distribution itself rather than a physical
/// moment. Error from the block spread.
ObservableEstimate estimate_alpha_spread(const Ensemble<PhasePoint>& ensemble,
                                         std::size_t mode,
                                         int n_sub = kDefaultSubensembles);

/// Normally ordered second-order correlation of modes k1, k2 from a
/// positive-P ensemble. Flagged unreliable when an occupation is consistent
/// with zero at 3 sigma.
ObservableEstimate estimate_g2(const Ensemble<PhasePoint>& ensemble, std::size_t k1,
                               std::size_t k2, int n_sub = kDefaultSubensembles);

/// <a_k1^dag a_k2> / sqrt(<n_k1><n_k2>) from a positive-P ensemble.
ObservableEstimate estimate_g1(const Ensemble<PhasePoint>& ensemble, std::size_t k1,
                               std::size_t k2, int n_sub = kDefaultSubensembles);

}  // namespace phasespace
