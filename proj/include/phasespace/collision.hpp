#pragma once

// Desk-scale 1D condensate collision: a trapped ground state is split into
// counter-propagating packets plus a weak seed and released on a ring.

#include <cstdint>
#include <span>
#include <vector>

#include "phasespace/boson.hpp"

namespace phasespace {

/// Ring of `modes` sites with omega_jj = 2J and omega_{j,j+-1} = -J, so the
/// single-particle dispersion is 2J (1 - cos k).
BoseLatticeModel collision_model(std::size_t modes, double hopping, double chi);

/// V_j = curvature/2 (j - c)^2 with c the lattice centre.
std::vector<double> harmonic_potential(std::size_t modes, double curvature);

struct GroundStateOptions {
  double tolerance = 1e-10;   // residual |H psi - mu psi| / sqrt(N), relative to mu
  std::size_t max_iterations = 200000;
};

/// Gross-Pitaevskii ground state of `model` plus `potential` holding
/// `atoms` particles, by normalized imaginary-time relaxation. Real and
/// non-negative up to a global phase.
std::vector<Complex> gp_ground_state(const BoseLatticeModel& model,
                                     std::span<const double> potential, double atoms,
                                     const GroundStateOptions& options = {});

/// Lattice momentum of DFT index n: 2 pi n / M folded into [-pi, pi).
double lattice_momentum(std::size_t index, std::size_t modes);

/// DFT index of the momentum closest to k.
std::size_t momentum_index(double k, std::size_t modes);

/// Index of -k.
std::size_t opposite_momentum(std::size_t index, std::size_t modes);

/// gp * [sqrt((1-s)/2) (e^{i vQ x} + e^{-i vQ x}) + sqrt(s) e^{-i vs x}] with x
/// measured from the lattice centre, rescaled to the norm of gp. Every
/// trajectory starts at the same coherent point (beta = conj(alpha)).
/// Throws ConfigError when |vQ| or |vs| reaches the Nyquist limit pi.
Ensemble<PhasePoint> init_collision_state(const BoseLatticeModel& model,
                                          std::span<const Complex> gp_profile, double vQ,
                                          double vs, double seed_fraction,
                                          std::size_t count, std::uint64_t seed);

/// The modulated mean field used by init_collision_state.
std::vector<Complex> collision_mean_field(std::span<const Complex> gp_profile, double vQ,
                                          double vs, double seed_fraction);

/// Positive-P ensemble in the plane-wave basis:
///   alpha_k = M^{-1/2} sum_x e^{-ikx} alpha_x,  beta_k = M^{-1/2} sum_x e^{ikx} beta_x.
/// Weights and alive flags are carried over.
Ensemble<PhasePoint> to_momentum(const Ensemble<PhasePoint>& ensemble);

struct PairCorrelation {
  std::size_t k = 0, minus_k = 0;
  double momentum = 0.0;
  ObservableEstimate density;       // <n_k>
  ObservableEstimate density_minus; // <n_-k>
  ObservableEstimate g2_same;       // g2(k, k)
  ObservableEstimate g2_opposite;   // g2(k, -k)
  ObservableEstimate g1_opposite;   // g1(k, -k)
  // |<a_k>|^2 / <n_k>: near 1 for modes carried by the mean field (the
  // packets and their four-wave-mixing products), near 0 for spontaneously
  // scattered atoms.
  double coherent_fraction = 0.0;

  /// Incoherent mode with every estimate resolved.
  bool scattered(double max_coherent_fraction = 0.05) const {
    return coherent_fraction < max_coherent_fraction && density.reliable &&
           g2_same.reliable && g2_opposite.reliable;
  }
};

/// Correlations for each requested momentum index, from a momentum-space
/// ensemble.
std::vector<PairCorrelation> pair_table(const Ensemble<PhasePoint>& momentum_ensemble,
                                        std::span<const std::size_t> modes,
                                        int n_sub = kDefaultSubensembles);

}  // namespace phasespace
