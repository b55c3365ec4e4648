#pragma once

#include <map>
#include <string>
#include <vector>

#include "phasespace/collision.hpp"
#include "phasespace/config.hpp"
#include "phasespace/series.hpp"

namespace phasespace {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitAbortFloor = 3,
  kExitIo = 4,
};

struct RunArtifact {
  RunConfig config;
  MomentSeries series;
  std::vector<PairCorrelation> pairs;  // collision only, at the last record
  double pairs_time = 0.0;
  std::size_t trajectory_count = 0;
  std::size_t dead_count = 0;
  std::size_t midpoint_fallbacks = 0;
  bool aborted = false;
  std::string abort_reason;
  std::string scheme;
  double wall_seconds = 0.0;
  std::map<std::string, double> diagnostics;

  int exit_code() const { return aborted ? kExitAbortFloor : kExitOk; }
};

/// Builds the model and initial ensemble, evolves, and records the
/// observables of the model:
///   kerr:           a, n, a2, var_x, var_p (quadratures at 0 and pi/2), alpha_spread
///   bose-hubbard:   n_j, g2_j_j (positive-P), total_n
///   collision:      nk_<index> for every plane wave, total_n; pair table at the end
///   fermi-hubbard:  n_up, n_down, double_occupancy, energy against tau
/// Oracle models emit the same columns (minus alpha_spread) with zero error.
RunArtifact run(const RunConfig& config);

/// One row per record: axis value(s), then <name>_re, <name>_im, <name>_err
/// per column, then n_alive. Thermal series add T = 1/tau after tau.
std::string series_csv(const MomentSeries& series);

std::string pairs_csv(const std::vector<PairCorrelation>& pairs);

/// Metadata wrapper: config echo, runtime facts and, for the JSON format,
/// the series itself.
std::string artifact_json(const RunArtifact& artifact, bool include_series);

/// Writes <path>.csv (+ <path>.pairs.csv) and <path>.json, or only
/// <path>.json for the JSON format. Returns the files written. Throws
/// IoError with the system message.
std::vector<std::string> write_artifact(const RunArtifact& artifact);

}  // namespace phasespace
