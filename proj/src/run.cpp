#include "phasespace/run.hpp"

#include <chrono>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "phasespace/boson.hpp"
#include "phasespace/fermion.hpp"
#include "phasespace/oracle.hpp"

namespace phasespace {

using Json = nlohmann::ordered_json;

namespace {

std::string scheme_suffix(const EngineOptions& e) {
  std::ostringstream s;
  if (e.stepper == Stepper::midpoint) {
    s << "implicit midpoint (" << e.midpoint_iterations << " iterations, tolerance "
      << e.midpoint_tolerance << ")";
  } else {
    s << "Euler-Maruyama";
  }
  if (e.noise_refinement > 1) s << ", noise refinement " << e.noise_refinement;
  return s.str();
}

ObservableEstimate exact(Complex value) {
  ObservableEstimate e;
  e.mean = value;
  return e;
}

std::vector<double> record_times(const ScheduleConfig& s) {
  const std::size_t stride = s.stride(), steps = s.steps();
  std::vector<double> t;
  for (std::size_t k = 0; k <= steps; k += stride) t.push_back(s.dt * static_cast<double>(k));
  return t;
}

template <class Point>
void absorb(RunArtifact& a, EvolveResult<Point>& r) {
  a.series = std::move(r.series);
  a.dead_count = r.dead_count;
  a.midpoint_fallbacks = r.midpoint_fallbacks;
  a.aborted = r.aborted;
  a.abort_reason = r.abort_reason;
  a.trajectory_count = r.ensemble.trajectory_count();
}

StepSchedule step_schedule(const ScheduleConfig& s) { return {s.dt, s.steps(), s.stride()}; }

void run_kerr(const RunConfig& c, RunArtifact& a) {
  const auto& p = c.kerr;
  const int n_sub = c.ensemble.n_sub;
  const KerrGaugeConfig gauge =
      p.gauge == "real_drift" ? KerrGaugeConfig::real_drift() : KerrGaugeConfig::none();
  const SdeProblem problem = kerr_problem(p.omega, p.n_mean, gauge);

  Recorder<PhasePoint> rec;
  rec.columns = {"a", "n", "a2", "var_x", "var_p", "alpha_spread"};
  rec.measure = [n_sub](const Ensemble<PhasePoint>& e) {
    return std::vector<ObservableEstimate>{
        estimate_amplitude(e, 0, n_sub),
        estimate_number(e, 0, Ordering::normal, n_sub),
        estimate_amplitude_squared(e, 0, n_sub),
        estimate_quadrature_variance(e, 0, 0.0, Ordering::normal, n_sub),
        estimate_quadrature_variance(e, 0, 0.5 * std::numbers::pi, Ordering::normal, n_sub),
        estimate_alpha_spread(e, 0, n_sub)};
  };

  auto ens = kerr_initial_ensemble(p.n_mean, c.ensemble.trajectories, c.ensemble.seed);
  auto fwd = evolve(std::move(ens), problem, step_schedule(c.schedule), c.engine, &rec);
  a.scheme = "positive-P (" + p.gauge + " gauge), " + scheme_suffix(c.engine);
  if (!p.time_reversal || fwd.aborted) {
    absorb(a, fwd);
    return;
  }
  auto back = evolve(std::move(fwd.ensemble), time_reverse(problem),
                     step_schedule(c.schedule), c.engine, &rec);
  // The second leg re-records its starting point; drop the duplicate.
  for (std::size_t r = 1; r < back.series.size(); ++r) {
    fwd.series.times.push_back(back.series.times[r]);
    fwd.series.rows.push_back(std::move(back.series.rows[r]));
    fwd.series.n_alive.push_back(back.series.n_alive[r]);
  }
  back.series = std::move(fwd.series);
  back.dead_count += fwd.dead_count;
  back.midpoint_fallbacks += fwd.midpoint_fallbacks;
  absorb(a, back);
  a.scheme += ", time reversed after span";
}

void oracle_kerr(const RunConfig& c, RunArtifact& a) {
  const auto& p = c.kerr;
  const Complex alpha{std::sqrt(p.n_mean), 0.0};
  // Scaled time 2 chi t with chi = 1/2 makes t the scaled time itself.
  constexpr double chi = 0.5;
  a.series.columns = {"a", "n", "a2", "var_x", "var_p"};
  for (double t : record_times(c.schedule)) {
    a.series.times.push_back(t);
    a.series.rows.push_back({exact(oracle::kerr_amplitude(alpha, p.omega, chi, t)),
                             exact(p.n_mean),
                             exact(oracle::kerr_amplitude_squared(alpha, p.omega, chi, t)),
                             exact(oracle::kerr_quadrature_variance(alpha, p.omega, chi, t, 0.0)),
                             exact(oracle::kerr_quadrature_variance(
                                 alpha, p.omega, chi, t, 0.5 * std::numbers::pi))});
    a.series.n_alive.push_back(0);
  }
  a.scheme = "exact closed form";
}

BoseLatticeModel bose_model(const BoseHubbardParams& p) {
  return BoseLatticeModel::chain(p.modes, p.hopping, p.chi, p.onsite, p.periodic);
}

std::vector<std::string> bose_columns(std::size_t modes, bool with_g2) {
  std::vector<std::string> cols;
  for (std::size_t j = 0; j < modes; ++j) cols.push_back("n_" + std::to_string(j));
  if (with_g2) {
    for (std::size_t j = 0; j < modes; ++j) {
      cols.push_back("g2_" + std::to_string(j) + "_" + std::to_string(j));
    }
  }
  cols.push_back("total_n");
  return cols;
}

void run_bose(const RunConfig& c, RunArtifact& a) {
  const auto& p = c.bose;
  const int n_sub = c.ensemble.n_sub;
  const BoseLatticeModel model = bose_model(p);
  const bool pp = c.model == ModelKind::bose_hubbard_pp;
  const std::size_t m = p.modes;

  Recorder<PhasePoint> rec;
  rec.columns = bose_columns(m, pp);
  rec.measure = [=](const Ensemble<PhasePoint>& e) {
    const Ordering ord = pp ? Ordering::normal : Ordering::symmetric;
    std::vector<ObservableEstimate> out;
    for (std::size_t j = 0; j < m; ++j) out.push_back(estimate_number(e, j, ord, n_sub));
    if (pp) {
      for (std::size_t j = 0; j < m; ++j) out.push_back(estimate_g2(e, j, j, n_sub));
    }
    out.push_back(estimate_total_number(e, ord, n_sub));
    return out;
  };

  if (pp) {
    const BoseGauge gauge = p.gauge == "real_drift" ? BoseGauge::real_drift : BoseGauge::none;
    auto ens = coherent_ensemble(p.alpha, c.ensemble.trajectories, c.ensemble.seed);
    auto r = evolve(std::move(ens), bose_hubbard_positive_p(model, gauge),
                    step_schedule(c.schedule), c.engine, &rec);
    absorb(a, r);
    a.scheme = "positive-P (" + p.gauge + " gauge), " + scheme_suffix(c.engine);
  } else {
    auto ens = wigner_ensemble(p.alpha, c.ensemble.trajectories, c.ensemble.seed);
    auto r = evolve(std::move(ens), bose_hubbard_wigner(model), step_schedule(c.schedule),
                    c.engine, &rec);
    absorb(a, r);
    a.scheme = "truncated Wigner, " + scheme_suffix(c.engine);
  }
}

void oracle_bose(const RunConfig& c, RunArtifact& a) {
  const auto& p = c.bose;
  const auto times = record_times(c.schedule);
  const auto res = oracle::ed_bose_evolve(bose_model(p), p.alpha, times);
  a.series.columns = bose_columns(p.modes, true);
  for (const auto& mo : res.moments) {
    std::vector<ObservableEstimate> row;
    double total = 0.0;
    for (std::size_t j = 0; j < p.modes; ++j) {
      const double n = mo.number_moment(j, j).real();
      total += n;
      row.push_back(exact(n));
    }
    for (std::size_t j = 0; j < p.modes; ++j) row.push_back(exact(mo.g2(j, j)));
    row.push_back(exact(total));
    a.series.times.push_back(mo.time);
    a.series.rows.push_back(std::move(row));
    a.series.n_alive.push_back(0);
  }
  a.diagnostics["fock_cutoff"] = static_cast<double>(res.n_max);
  a.diagnostics["norm_deficit"] = res.norm_deficit;
  a.scheme = "exact diagonalization (Fock basis)";
}

void run_collision(const RunConfig& c, RunArtifact& a) {
  const auto& p = c.collision;
  const int n_sub = c.ensemble.n_sub;
  const BoseLatticeModel model = collision_model(p.modes, p.hopping, p.chi);
  const auto gp = gp_ground_state(model, harmonic_potential(p.modes, p.trap_curvature), p.atoms);
  const double vQ = lattice_momentum(p.packet_index, p.modes);
  const double vs = lattice_momentum(p.seed_index, p.modes);
  auto ens = init_collision_state(model, gp, vQ, vs, p.seed_fraction, c.ensemble.trajectories,
                                  c.ensemble.seed);

  const std::size_t m = p.modes;
  Recorder<PhasePoint> rec;
  for (std::size_t k = 0; k < m; ++k) rec.columns.push_back("nk_" + std::to_string(k));
  rec.columns.push_back("total_n");
  rec.measure = [=](const Ensemble<PhasePoint>& e) {
    const auto km = to_momentum(e);
    std::vector<ObservableEstimate> out;
    for (std::size_t k = 0; k < m; ++k) out.push_back(estimate_number(km, k, Ordering::normal, n_sub));
    out.push_back(estimate_total_number(e, Ordering::normal, n_sub));
    return out;
  };

  auto r = evolve(std::move(ens), bose_hubbard_positive_p(model), step_schedule(c.schedule),
                  c.engine, &rec);
  if (!r.aborted) {
    std::vector<std::size_t> modes;
    for (std::size_t k = 0; k <= m / 2; ++k) modes.push_back(k);
    a.pairs = pair_table(to_momentum(r.ensemble), modes, n_sub);
    a.pairs_time = r.ensemble.time;
  }
  absorb(a, r);
  a.scheme = "positive-P (none gauge), " + scheme_suffix(c.engine);
}

FermiHubbardModel fermi_model(const FermiParams& p) {
  if (p.lattice == "rectangle") {
    return FermiHubbardModel::rectangle(p.lx, p.ly, p.t, p.U, p.mu, p.periodic);
  }
  return FermiHubbardModel::chain(p.sites, p.t, p.U, p.mu, p.periodic);
}

MomentSeries head(const MomentSeries& s, std::size_t n) {
  MomentSeries out = s;
  out.times.resize(n);
  out.rows.resize(n);
  out.n_alive.resize(n);
  return out;
}

void run_fermi(const RunConfig& c, RunArtifact& a) {
  const auto model = fermi_model(c.fermi);
  const auto schedule =
      ThermalSchedule::uniform(c.schedule.span, c.schedule.dt, c.schedule.record_every);
  auto init = init_infinite_temperature(model, c.ensemble.trajectories, c.ensemble.seed);
  a.scheme = "Gaussian fermionic (number conserving), " + scheme_suffix(c.engine);
  if (!c.fermi.extrapolate) {
    auto r = evolve_thermal(std::move(init), model, schedule, c.engine, c.ensemble.n_sub);
    a.diagnostics["max_relative_imaginary"] = max_relative_imaginary(r.ensemble);
    absorb(a, r);
    return;
  }
  auto x = evolve_thermal_extrapolated(init, model, schedule, c.engine, c.ensemble.n_sub);
  if (x.aborted()) {
    // Extrapolate over the records both runs reached.
    const std::size_t n = std::min(x.coarse.series.size(), x.fine.series.size());
    x.series = richardson(head(x.coarse.series, n), head(x.fine.series, n));
  }
  a.series = std::move(x.series);
  a.trajectory_count = init.trajectory_count();
  a.dead_count = x.coarse.dead_count + x.fine.dead_count;
  a.midpoint_fallbacks = x.coarse.midpoint_fallbacks + x.fine.midpoint_fallbacks;
  a.aborted = x.aborted();
  a.abort_reason = x.coarse.aborted ? x.coarse.abort_reason : x.fine.abort_reason;
  a.diagnostics["max_relative_imaginary"] =
      std::max(max_relative_imaginary(x.coarse.ensemble), max_relative_imaginary(x.fine.ensemble));
  a.scheme += ", step-halving extrapolation";
}

void oracle_fermi(const RunConfig& c, RunArtifact& a) {
  const auto model = fermi_model(c.fermi);
  const auto taus = record_times(c.schedule);
  a.series.axis = "tau";
  a.series.columns = {"n_up", "n_down", "double_occupancy", "energy"};
  for (const auto& th : oracle::ed_fermi_thermal(model, taus)) {
    double up = 0.0, down = 0.0;
    for (double v : th.density_up) up += v;
    for (double v : th.density_down) down += v;
    const double m = static_cast<double>(model.sites);
    a.series.times.push_back(th.tau);
    a.series.rows.push_back({exact(up / m), exact(down / m), exact(th.double_occupancy),
                             exact(th.energy)});
    a.series.n_alive.push_back(0);
  }
  a.scheme = "exact diagonalization (grand canonical)";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": " + std::strerror(errno));
  f << content;
  f.flush();
  if (!f) throw IoError(path + ": " + std::strerror(errno));
}

Json estimate_json(const ObservableEstimate& e) {
  return {{"re", e.mean.real()}, {"im", e.mean.imag()}, {"err", e.std_error}};
}

}  // namespace

RunArtifact run(const RunConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  RunArtifact a;
  a.config = config;
  switch (config.model) {
    case ModelKind::kerr: run_kerr(config, a); break;
    case ModelKind::oracle_kerr: oracle_kerr(config, a); break;
    case ModelKind::bose_hubbard_pp:
    case ModelKind::bose_hubbard_wigner: run_bose(config, a); break;
    case ModelKind::oracle_bose_hubbard: oracle_bose(config, a); break;
    case ModelKind::collision: run_collision(config, a); break;
    case ModelKind::fermi_hubbard: run_fermi(config, a); break;
    case ModelKind::oracle_fermi_hubbard: oracle_fermi(config, a); break;
  }
  a.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return a;
}

std::string series_csv(const MomentSeries& s) {
  const bool thermal = s.axis == "tau";
  std::ostringstream out;
  out << s.axis;
  if (thermal) out << ",T";
  for (const auto& c : s.columns) out << ',' << c << "_re," << c << "_im," << c << "_err";
  out << ",n_alive\n";
  for (std::size_t r = 0; r < s.size(); ++r) {
    out << num(s.times[r]);
    if (thermal) out << ',' << (s.times[r] > 0.0 ? num(1.0 / s.times[r]) : "inf");
    for (const auto& e : s.rows[r]) {
      out << ',' << num(e.mean.real()) << ',' << num(e.mean.imag()) << ',' << num(e.std_error);
    }
    out << ',' << s.n_alive[r] << '\n';
  }
  return out.str();
}

std::string pairs_csv(const std::vector<PairCorrelation>& pairs) {
  std::ostringstream out;
  out << "k,minus_k,momentum,n_k,n_k_err,n_minus_k,n_minus_k_err,g2_same,g2_same_err,"
         "g2_same_reliable,g2_opposite,g2_opposite_err,g2_opposite_reliable,g1_opposite_re,"
         "g1_opposite_im,g1_opposite_err,coherent_fraction,scattered\n";
  for (const auto& p : pairs) {
    out << p.k << ',' << p.minus_k << ',' << num(p.momentum) << ','
        << num(p.density.mean.real()) << ',' << num(p.density.std_error) << ','
        << num(p.density_minus.mean.real()) << ',' << num(p.density_minus.std_error) << ','
        << num(p.g2_same.mean.real()) << ',' << num(p.g2_same.std_error) << ','
        << (p.g2_same.reliable ? 1 : 0) << ',' << num(p.g2_opposite.mean.real()) << ','
        << num(p.g2_opposite.std_error) << ',' << (p.g2_opposite.reliable ? 1 : 0) << ','
        << num(p.g1_opposite.mean.real()) << ',' << num(p.g1_opposite.mean.imag()) << ','
        << num(p.g1_opposite.std_error) << ',' << num(p.coherent_fraction) << ','
        << (p.scattered() ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string artifact_json(const RunArtifact& a, bool include_series) {
  Json doc;
  doc["version"] = kVersion;
  doc["scheme"] = a.scheme;
  doc["config"] = Json::parse(dump_config(a.config));
  doc["trajectories"] = a.trajectory_count;
  doc["dead_count"] = a.dead_count;
  doc["midpoint_fallbacks"] = a.midpoint_fallbacks;
  doc["aborted"] = a.aborted;
  doc["abort_reason"] = a.abort_reason;
  doc["wall_seconds"] = a.wall_seconds;
  Json diag = Json::object();
  for (const auto& [k, v] : a.diagnostics) diag[k] = v;
  doc["diagnostics"] = diag;
  if (include_series) {
    const auto& s = a.series;
    Json rows = Json::array();
    for (std::size_t r = 0; r < s.size(); ++r) {
      Json row;
      row[s.axis] = s.times[r];
      for (std::size_t c = 0; c < s.columns.size(); ++c) {
        row[s.columns[c]] = estimate_json(s.rows[r][c]);
      }
      row["n_alive"] = s.n_alive[r];
      rows.push_back(row);
    }
    doc["series"] = {{"axis", s.axis}, {"columns", s.columns}, {"rows", rows}};
    if (!a.pairs.empty()) {
      Json pairs = Json::array();
      for (const auto& p : a.pairs) {
        pairs.push_back({{"k", p.k},
                         {"minus_k", p.minus_k},
                         {"momentum", p.momentum},
                         {"n_k", estimate_json(p.density)},
                         {"n_minus_k", estimate_json(p.density_minus)},
                         {"g2_same", estimate_json(p.g2_same)},
                         {"g2_opposite", estimate_json(p.g2_opposite)},
                         {"g1_opposite", estimate_json(p.g1_opposite)},
                         {"coherent_fraction", p.coherent_fraction},
                         {"scattered", p.scattered()}});
      }
      doc["pairs"] = {{"time", a.pairs_time}, {"rows", pairs}};
    }
  }
  return doc.dump(2) + "\n";
}

std::vector<std::string> write_artifact(const RunArtifact& a) {
  std::string prefix = a.config.output.path;
  for (const char* ext : {".csv", ".json"}) {
    if (prefix.ends_with(ext)) prefix.resize(prefix.size() - std::strlen(ext));
  }
  const std::filesystem::path parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError(parent.string() + ": " + ec.message());
  }
  std::vector<std::string> written;
  if (a.config.output.format == OutputFormat::csv) {
    write_file(prefix + ".csv", series_csv(a.series));
    written.push_back(prefix + ".csv");
    if (!a.pairs.empty()) {
      write_file(prefix + ".pairs.csv", pairs_csv(a.pairs));
      written.push_back(prefix + ".pairs.csv");
    }
    write_file(prefix + ".json", artifact_json(a, false));
  } else {
    write_file(prefix + ".json", artifact_json(a, true));
  }
  written.push_back(prefix + ".json");
  return written;
}

}  // namespace phasespace
