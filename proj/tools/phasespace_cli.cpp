// phasespace: batch front end. One subcommand per model family; the run is
// described by a JSON config, with a few command-line overrides.

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasespace/config.hpp"
#include "phasespace/run.hpp"

namespace {

using phasespace::ConfigError;
using phasespace::ModelKind;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::optional<std::size_t> workers;
  std::optional<std::string> output;
  bool echo_only = false;
};

struct Family {
  const char* command;
  const char* help;
  std::vector<ModelKind> models;
};

const std::vector<Family>& families() {
  static const std::vector<Family> f{
      {"kerr", "single-mode Kerr oscillator (positive-P)", {ModelKind::kerr}},
      {"bose-hubbard", "Bose-Hubbard lattice (positive-P or truncated Wigner)",
       {ModelKind::bose_hubbard_pp, ModelKind::bose_hubbard_wigner}},
      {"collision", "1D condensate collision with pair correlations", {ModelKind::collision}},
      {"fermi-hubbard", "Hubbard model in thermal equilibrium", {ModelKind::fermi_hubbard}},
      {"oracle", "exact references (oracle-kerr, oracle-bose-hubbard, oracle-fermi-hubbard)",
       {ModelKind::oracle_kerr, ModelKind::oracle_bose_hubbard,
        ModelKind::oracle_fermi_hubbard}},
  };
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw phasespace::IoError(path + ": " + std::strerror(errno));
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Applies overrides on the document so that they pass the same validation
// and appear in the echo.
std::string apply_overrides(const std::string& text, const Family& fam, const Overrides& o) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "document must be a JSON object");
  if (!doc.contains("model") && fam.models.size() == 1) {
    doc["model"] = std::string(phasespace::to_string(fam.models.front()));
  }
  if (o.seed) doc["ensemble"]["seed"] = *o.seed;
  if (o.trajectories) doc["ensemble"]["trajectories"] = *o.trajectories;
  if (o.workers) doc["engine"]["workers"] = *o.workers;
  if (o.output) doc["output"]["path"] = *o.output;
  return doc.dump();
}

int execute(const Family& fam, const Overrides& o) {
  try {
    const std::string text = apply_overrides(read_file(o.config_path), fam, o);
    const auto config = phasespace::parse_config(text);
    bool allowed = false;
    for (ModelKind m : fam.models) allowed = allowed || m == config.model;
    if (!allowed) {
      throw ConfigError("model", "'" + std::string(phasespace::to_string(config.model)) +
                                     "' does not belong to subcommand '" + fam.command + "'");
    }
    if (o.echo_only) {
      std::cout << phasespace::dump_config(config) << '\n';
      return phasespace::kExitOk;
    }
    const auto artifact = phasespace::run(config);
    for (const auto& path : phasespace::write_artifact(artifact)) {
      std::cout << "wrote " << path << '\n';
    }
    std::cout << "scheme: " << artifact.scheme << '\n'
              << "records: " << artifact.series.size() << ", dead trajectories: "
              << artifact.dead_count << ", wall time: " << artifact.wall_seconds << " s\n";
    if (artifact.aborted) {
      std::cerr << "abort floor breached: " << artifact.abort_reason << '\n';
    }
    return artifact.exit_code();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return phasespace::kExitConfig;
  } catch (const phasespace::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return phasespace::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic phase-space simulations with exact references"};
  app.require_subcommand(1);
  app.set_version_flag("--version", phasespace::kVersion);

  Overrides o;
  const Family* chosen = nullptr;
  for (const auto& fam : families()) {
    auto* sub = app.add_subcommand(fam.command, fam.help);
    sub->add_option("-c,--config", o.config_path, "JSON run configuration")->required();
    sub->add_option("--seed", o.seed, "override ensemble.seed");
    sub->add_option("--trajectories", o.trajectories, "override ensemble.trajectories");
    sub->add_option("--workers", o.workers, "override engine.workers");
    sub->add_option("-o,--output", o.output, "override output.path (file prefix)");
    sub->add_flag("--echo-config", o.echo_only, "print the effective config and exit");
    sub->callback([&chosen, &fam] { chosen = &fam; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : phasespace::kExitConfig;
  }
  return execute(*chosen, o);
}
