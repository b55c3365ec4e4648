#pragma once

// Run configuration for the batch front end. Documents are JSON objects with
// the sections model, params, schedule, ensemble, output and engine; every
// field has a default, unknown keys are rejected and errors name the key.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phasespace/common.hpp"
#include "phasespace/sde.hpp"

namespace phasespace {

enum class ModelKind {
  kerr,
  bose_hubbard_pp,
  bose_hubbard_wigner,
  collision,
  fermi_hubbard,
  oracle_kerr,
  oracle_bose_hubbard,
  oracle_fermi_hubbard,
};

std::string_view to_string(ModelKind kind);
ModelKind model_from_string(const std::string& name);  // throws ConfigError("model")
bool is_oracle(ModelKind kind);

/// Single-mode Kerr oscillator in scaled time 2 chi t.
struct KerrParams {
  double n_mean = 100.0;
  double omega = 0.0;          // linear frequency in the same scaled units
  std::string gauge = "none";  // none | real_drift
  bool time_reversal = false;  // run span forward, then span with H -> -H
};

struct BoseHubbardParams {
  std::size_t modes = 2;
  double hopping = 1.0;
  double chi = 0.1;
  double onsite = 0.0;
  bool periodic = false;
  std::vector<Complex> alpha{Complex{1.7320508075688772, 0.0}, Complex{1.0, 0.0}};
  std::string gauge = "none";  // positive-P only: none | real_drift
};

struct CollisionParams {
  std::size_t modes = 64;
  double hopping = 1.0;
  double chi = 0.02;
  double atoms = 640.0;
  double trap_curvature = 2e-4;
  std::size_t packet_index = 8;  // packets at momenta +-2 pi packet_index / modes
  std::size_t seed_index = 8;    // seed at -2 pi seed_index / modes
  double seed_fraction = 0.02;
};

struct FermiParams {
  std::string lattice = "chain";  // chain | rectangle
  std::size_t sites = 4;          // chain
  std::size_t lx = 2, ly = 2;     // rectangle
  double t = 1.0;
  double U = 2.0;
  double mu = 0.5;
  bool periodic = false;
  bool extrapolate = true;  // step-halving extrapolation (simulation only)
};

/// Real-time models use dt / span; the thermal model uses the same fields
/// under the names d_tau / tau_max.
struct ScheduleConfig {
  double dt = 0.0;
  double span = 0.0;
  double record_every = 0.0;

  std::size_t steps() const;
  std::size_t stride() const;
};

struct EnsembleConfig {
  std::size_t trajectories = 1000;
  std::uint64_t seed = 1;
  int n_sub = 10;
};

enum class OutputFormat { csv, json };

struct OutputConfig {
  std::string path = "phasespace_run";  // file prefix
  OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
  ModelKind model = ModelKind::kerr;
  KerrParams kerr;
  BoseHubbardParams bose;
  CollisionParams collision;
  FermiParams fermi;
  ScheduleConfig schedule;
  EnsembleConfig ensemble;
  OutputConfig output;
  EngineOptions engine;
};

/// Parses and validates a JSON document. Schedule defaults depend on the
/// model. Throws ConfigError naming the offending key ("section.key").
RunConfig parse_config(std::string_view text);

/// The effective configuration, defaults included, as a JSON document that
/// parse_config maps back to the same RunConfig.
std::string dump_config(const RunConfig& config, int indent = 2);

/// Re-runs every range check (used after programmatic edits).
void validate(const RunConfig& config);

}  // namespace phasespace
