#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phasespace/config.hpp"
#include "phasespace/run.hpp"

using namespace phasespace;

namespace {

std::string error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<accepted>";
}

std::filesystem::path scratch_dir() {
  auto p = std::filesystem::temp_directory_path() / "phasespace_tests";
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config echoes its defaults") {
  const auto c = parse_config(R"({"model": "kerr"})");
  CHECK(c.ensemble.n_sub == 10);
  CHECK(c.engine.stepper == Stepper::midpoint);
  const std::string echo = dump_config(c);
  CHECK(echo.find("\"n_sub\": 10") != std::string::npos);
  CHECK(echo.find("\"stepper\": \"midpoint\"") != std::string::npos);
  // The echo parses back to the same configuration.
  CHECK(dump_config(parse_config(echo)) == echo);
}

TEST_CASE("range and key errors name the offending key") {
  CHECK(error_key(R"({"model": "kerr", "ensemble": {"trajectories": 0}})") == "ensemble.trajectories");
  CHECK(error_key(R"({"model": "fermi-hubbard", "schedule": {"d_tau": -0.1}})") == "schedule.d_tau");
  CHECK(error_key(R"({"model": "kerr", "schedule": {"d_tau": 0.1}})") == "schedule.d_tau");
  CHECK(error_key(R"({"model": "kerr", "extra": 1})") == "extra");
  CHECK(error_key(R"({"model": "kerr", "params": {"U": 1}})") == "params.U");
  CHECK(error_key(R"({"model": "warp-drive"})") == "model");
  CHECK(error_key(R"({"params": {}})") == "model");
  CHECK(error_key(R"({"model": "kerr", "engine": {"abort_floor": 1.5}})") == "engine.abort_floor");
  CHECK(error_key(R"({"model": "kerr", "engine": {"stepper": "rk4"}})") == "engine.stepper");
  CHECK(error_key(R"({"model": "kerr", "schedule": {"dt": 0.001, "record_every": 0.0015}})") ==
        "schedule.record_every");
  CHECK(error_key(R"({"model": "bose-hubbard-pp", "params": {"modes": 3}})") == "params.alpha");
  CHECK(error_key(R"({"model": "bose-hubbard-wigner", "params": {"gauge": "none"}})") == "params.gauge");
  CHECK(error_key(R"({"model": "collision", "params": {"packet_index": 32}})") == "params.packet_index");
  CHECK(error_key(R"({"model": "fermi-hubbard", "params": {"U": 0}})") == "params.U");
  CHECK(error_key(R"({"model": "oracle-fermi-hubbard", "params": {"U": 0}})") == "<accepted>");
  CHECK(error_key(R"({"model": "kerr", "ensemble": {"seed": -3}})") == "ensemble.seed");
  CHECK(error_key(R"({"model": "kerr", "output": {"format": "xml"}})") == "output.format");
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
}

TEST_CASE("amplitudes accept reals and pairs") {
  const auto c = parse_config(
      R"({"model": "bose-hubbard-pp", "params": {"modes": 2, "alpha": [1.5, [0.5, -2]]}})");
  REQUIRE(c.bose.alpha.size() == 2);
  CHECK(c.bose.alpha[0] == Complex{1.5, 0.0});
  CHECK(c.bose.alpha[1] == Complex{0.5, -2.0});
}

}  // TEST_SUITE

TEST_SUITE("run") {

TEST_CASE("identical configs give identical numeric payloads for any worker count") {
  auto c = parse_config(R"({"model": "kerr", "params": {"n_mean": 10},
      "schedule": {"dt": 0.001, "span": 0.1, "record_every": 0.05},
      "ensemble": {"trajectories": 64, "seed": 9}})");
  const auto a = run(c);
  const auto b = run(c);
  c.engine.workers = 3;
  const auto w = run(c);
  CHECK(series_csv(a.series) == series_csv(b.series));
  CHECK(series_csv(a.series) == series_csv(w.series));
}

TEST_CASE("every column carries an error column") {
  const auto a = run(parse_config(R"({"model": "bose-hubbard-pp",
      "schedule": {"span": 0.1, "record_every": 0.05}, "ensemble": {"trajectories": 40}})"));
  std::istringstream csv(series_csv(a.series));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,n_0_re,n_0_im,n_0_err,n_1_re,n_1_im,n_1_err,g2_0_0_re,g2_0_0_im,"
                  "g2_0_0_err,g2_1_1_re,g2_1_1_im,g2_1_1_err,total_n_re,total_n_im,"
                  "total_n_err,n_alive");
}

TEST_CASE("oracle and simulation artifacts share the grid and the columns") {
  const std::string body = R"("schedule": {"dt": 0.002, "span": 0.2, "record_every": 0.05},
      "ensemble": {"trajectories": 40})";
  const auto sim = run(parse_config(R"({"model": "bose-hubbard-pp", )" + body + "}"));
  const auto ed = run(parse_config(R"({"model": "oracle-bose-hubbard", )" + body + "}"));
  CHECK(sim.series.columns == ed.series.columns);
  REQUIRE(sim.series.size() == ed.series.size());
  for (std::size_t r = 0; r < sim.series.size(); ++r) {
    CHECK(sim.series.times[r] == ed.series.times[r]);
  }
}

TEST_CASE("four-site Hubbard run reproduces the exact double occupancy") {
  const std::string body = R"("params": {"lattice": "chain", "sites": 4, "t": 1, "U": 2, "mu": 0.5},
      "schedule": {"d_tau": 0.025, "tau_max": 1.0, "record_every": 0.25},
      "ensemble": {"trajectories": 4000, "seed": 77})";
  // Reference generated by the exact oracle at test time.
  const auto ed = run(parse_config(R"({"model": "oracle-fermi-hubbard", )" + body + "}"));
  const auto sim = run(parse_config(R"({"model": "fermi-hubbard", )" + body + "}"));
  REQUIRE_FALSE(sim.aborted);
  REQUIRE(sim.series.size() == ed.series.size());
  for (std::size_t r = 0; r < sim.series.size(); ++r) {
    const auto& s = sim.series.at(r, "double_occupancy");
    const auto& e = ed.series.at(r, "double_occupancy");
    CAPTURE(sim.series.times[r]);
    CHECK(std::abs(s.mean.real() - e.mean.real()) <= 3.0 * s.std_error + 1e-15);
  }
  CHECK(sim.diagnostics.at("max_relative_imaginary") < 1e-8);
  const std::string csv = series_csv(sim.series);
  CHECK(csv.rfind("tau,T,", 0) == 0);
  CHECK(csv.find("\n0,inf,") != std::string::npos);
}

TEST_CASE("abort floor breach returns a partial artifact and exit code 3") {
  const auto a = run(parse_config(R"({"model": "kerr",
      "schedule": {"dt": 0.001, "span": 2.0, "record_every": 0.05},
      "ensemble": {"trajectories": 200}})"));
  CHECK(a.aborted);
  CHECK(a.exit_code() == kExitAbortFloor);
  CHECK(a.series.size() > 1);
  CHECK(a.series.size() < 41);
}

TEST_CASE("artifacts on disk") {
  const auto dir = scratch_dir();
  auto c = parse_config(R"({"model": "collision", "params": {"modes": 16, "atoms": 100,
      "packet_index": 2, "seed_index": 2}, "schedule": {"dt": 0.01, "span": 0.1,
      "record_every": 0.05}, "ensemble": {"trajectories": 20}})");
  c.output.path = (dir / "col").string();
  const auto a = run(c);
  const auto files = write_artifact(a);
  CHECK(files.size() == 3);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  std::ifstream meta(dir / "col.json");
  std::stringstream s;
  s << meta.rdbuf();
  CHECK(s.str().find("\"trap_curvature\"") != std::string::npos);
  CHECK(s.str().find("\"version\"") != std::string::npos);

  c.output.format = OutputFormat::json;
  c.output.path = (dir / "col_json").string();
  CHECK(write_artifact(run(c)).size() == 1);

  c.output.path = "/proc/definitely/not/writable/out";
  auto bad = a;
  bad.config = c;
  CHECK_THROWS_AS(write_artifact(bad), IoError);
}

}  // TEST_SUITE
