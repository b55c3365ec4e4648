#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phasespace/ensemble.hpp"
#include "phasespace/estimate.hpp"
#include "phasespace/sde.hpp"
#include "phasespace/series.hpp"

namespace phasespace {

struct LatticeDescriptor {
  enum class Kind { chain, rectangle, custom };
  Kind kind = Kind::custom;
  std::size_t lx = 0, ly = 1;
  bool periodic = false;

  std::string describe() const;
};

/// H = -sum_{ij,s} t_ij a_{is}^dag a_{js} + U sum_j n_{j down} n_{j up},
/// sampled in the grand-canonical ensemble at chemical potential mu.
struct FermiHubbardModel {
  std::size_t sites = 0;
  std::vector<double> t_hop;  // row-major sites x sites, symmetric, zero diagonal
  double U = 0.0;
  double mu = 0.0;
  LatticeDescriptor lattice;

  double hopping(std::size_t i, std::size_t j) const { return t_hop[i * sites + j]; }

  /// Throws ConfigError. `allow_free` admits U = 0, which only the oracles
  /// accept; the phase-space mapping needs U > 0.
  void validate(bool allow_free = false) const;

  static FermiHubbardModel chain(std::size_t sites, double t, double U, double mu,
                                 bool periodic = false);
  static FermiHubbardModel rectangle(std::size_t lx, std::size_t ly, double t, double U,
                                     double mu, bool periodic = false);
};

/// Inverse-temperature grid. Recorded tau values must sit on the step grid.
struct ThermalSchedule {
  double tau_max = 0.0;
  double d_tau = 0.0;
  std::vector<double> record_taus;

  /// Records every `record_spacing` from 0 to tau_max inclusive.
  static ThermalSchedule uniform(double tau_max, double d_tau, double record_spacing);
  void validate() const;
  std::size_t step_of(double tau) const;
};

/// Imaginary-time Ito equations of the number-conserving Gaussian mapping:
///
///   dn_s/dtau = 1/2 {(I - n_s) T_s^(1) n_s + n_s T_s^(2) (I - n_s)}
///   T^(r)_{ij,s} = t_ij - delta_ij {U n_{jj,-s} - mu + s xi_j^(r)}
///   <xi_j^(r) xi_j'^(r')> = 2U delta(tau - tau') delta_jj' delta_rr'
///   dOmega/dtau = -Omega [H(n) - mu N(n)]
///
/// with s = -1 for spin up and +1 for spin down; the 2M noises are shared
/// between the spins. State layout follows FermiPoint.
SdeProblem fermi_hubbard_problem(const FermiHubbardModel& model);

/// n_up = n_down = I/2, log-weight 0: the Gaussian proportional to the
/// identity operator, i.e. the infinite-temperature state.
Ensemble<FermiPoint> init_infinite_temperature(const FermiHubbardModel& model,
                                               std::size_t trajectory_count,
                                               std::uint64_t seed);

/// (1/M) sum_j <n_{j down} n_{j up}>.
ObservableEstimate estimate_double_occupancy(const Ensemble<FermiPoint>& ensemble,
                                             int n_sub = kDefaultSubensembles);

/// <H> with H(n) = -sum t_ij n_ij,s + U sum_j n_jj,down n_jj,up.
ObservableEstimate estimate_energy(const Ensemble<FermiPoint>& ensemble,
                                   const FermiHubbardModel& model,
                                   int n_sub = kDefaultSubensembles);

/// (1/M) sum_j <n_{j s}> for one spin.
ObservableEstimate estimate_density(const Ensemble<FermiPoint>& ensemble, Spin spin,
                                    int n_sub = kDefaultSubensembles);

/// Largest |Im| over all Green's-function entries and log-weights, relative
/// to max(1, |value|).
double max_relative_imaginary(const Ensemble<FermiPoint>& ensemble);

/// Evolves from the current ensemble through every recorded tau and
/// measures density (per spin), double occupancy and energy. Series axis is
/// "tau"; columns: n_up, n_down, double_occupancy, energy.
EvolveResult<FermiPoint> evolve_thermal(Ensemble<FermiPoint> ensemble,
                                        const FermiHubbardModel& model,
                                        const ThermalSchedule& schedule,
                                        const EngineOptions& options,
                                        int n_sub = kDefaultSubensembles);

struct ExtrapolatedThermal {
  MomentSeries series;  // richardson(coarse, fine)
  EvolveResult<FermiPoint> coarse;
  EvolveResult<FermiPoint> fine;
  bool aborted() const { return coarse.aborted || fine.aborted; }
};

/// Runs the schedule at d_tau (with doubled noise refinement) and at d_tau/2
/// from the same initial ensemble, so both see identical Wiener paths, and
/// extrapolates the recorded series. The midpoint scheme is first order in
/// the weak sense here; extrapolation removes the leading bias.
ExtrapolatedThermal evolve_thermal_extrapolated(const Ensemble<FermiPoint>& initial,
                                                const FermiHubbardModel& model,
                                                const ThermalSchedule& schedule,
                                                const EngineOptions& options,
                                                int n_sub = kDefaultSubensembles);

}  // namespace phasespace
