#include "phasespace/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace phasespace {

using Json = nlohmann::ordered_json;

namespace {

struct ModelName {
  ModelKind kind;
  std::string_view name;
};

constexpr ModelName kModels[] = {
    {ModelKind::kerr, "kerr"},
    {ModelKind::bose_hubbard_pp, "bose-hubbard-pp"},
    {ModelKind::bose_hubbard_wigner, "bose-hubbard-wigner"},
    {ModelKind::collision, "collision"},
    {ModelKind::fermi_hubbard, "fermi-hubbard"},
    {ModelKind::oracle_kerr, "oracle-kerr"},
    {ModelKind::oracle_bose_hubbard, "oracle-bose-hubbard"},
    {ModelKind::oracle_fermi_hubbard, "oracle-fermi-hubbard"},
};

bool thermal(ModelKind k) {
  return k == ModelKind::fermi_hubbard || k == ModelKind::oracle_fermi_hubbard;
}

// Field readers. Each leaves `out` untouched when the key is absent.
class Section {
 public:
  Section(const Json& doc, std::string name) : name_(std::move(name)) {
    if (!doc.contains(name_)) return;
    node_ = &doc.at(name_);
    if (!node_->is_object()) throw ConfigError(name_, "must be an object");
  }

  void allow(std::initializer_list<std::string_view> keys) {
    if (!node_) return;
    const std::set<std::string_view> ok(keys);
    for (const auto& [key, value] : node_->items()) {
      if (!ok.contains(key)) throw ConfigError(path(key), "unknown key");
    }
  }

  void number(std::string_view key, double& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(path(key), "must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(path(key), "must be finite");
    }
  }

  void count(std::string_view key, std::size_t& out) const {
    if (const Json* v = find(key)) {
      if (v->is_number_integer() && v->get<std::int64_t>() < 0) {
        throw ConfigError(path(key), "must be >= 0");
      }
      if (!v->is_number_unsigned() && !v->is_number_integer()) {
        throw ConfigError(path(key), "must be an integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void integer(std::string_view key, int& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(path(key), "must be an integer");
      const auto x = v->get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError(path(key), "out of range");
      }
      out = static_cast<int>(x);
    }
  }

  void seed(std::string_view key, std::uint64_t& out) const {
    if (const Json* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else if (v->is_number_integer()) {
        throw ConfigError(path(key), "must be >= 0");
      } else {
        throw ConfigError(path(key), "must be an integer");
      }
    }
  }

  void flag(std::string_view key, bool& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(path(key), "must be true or false");
      out = v->get<bool>();
    }
  }

  void text(std::string_view key, std::string& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(path(key), "must be a string");
      out = v->get<std::string>();
    }
  }

  // Amplitudes: a real number or a [re, im] pair per entry.
  void amplitudes(std::string_view key, std::vector<Complex>& out) const {
    const Json* v = find(key);
    if (!v) return;
    if (!v->is_array()) throw ConfigError(path(key), "must be an array");
    out.clear();
    for (const auto& e : *v) {
      if (e.is_number()) {
        out.emplace_back(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(path(key), "entries must be numbers or [re, im] pairs");
      }
      if (!std::isfinite(out.back().real()) || !std::isfinite(out.back().imag())) {
        throw ConfigError(path(key), "entries must be finite");
      }
    }
  }

  std::string path(std::string_view key) const { return name_ + "." + std::string(key); }

 private:
  const Json* find(std::string_view key) const {
    if (!node_) return nullptr;
    auto it = node_->find(std::string(key));
    return it == node_->end() ? nullptr : &*it;
  }

  std::string name_;
  const Json* node_ = nullptr;
};

ScheduleConfig default_schedule(ModelKind kind) {
  switch (kind) {
    case ModelKind::kerr:
    case ModelKind::oracle_kerr:
      return {0.0002, 0.3, 0.01};
    case ModelKind::bose_hubbard_pp:
    case ModelKind::bose_hubbard_wigner:
    case ModelKind::oracle_bose_hubbard:
      return {0.002, 2.0, 0.05};
    case ModelKind::collision:
      return {0.0025, 1.0, 0.25};
    case ModelKind::fermi_hubbard:
    case ModelKind::oracle_fermi_hubbard:
      return {0.025, 4.0, 0.05};
  }
  return {};
}

// Ratio that must be a positive integer up to rounding of decimal input.
std::size_t whole_ratio(double num, double den, const std::string& key) {
  const double r = num / den;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-8 * n) {
    throw ConfigError(key, "must be a whole multiple of the step");
  }
  return static_cast<std::size_t>(n);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  for (const auto& m : kModels) {
    if (m.kind == kind) return m.name;
  }
  return "?";
}

ModelKind model_from_string(const std::string& name) {
  for (const auto& m : kModels) {
    if (m.name == name) return m.kind;
  }
  throw ConfigError("model", "unknown model '" + name + "'");
}

bool is_oracle(ModelKind kind) {
  return kind == ModelKind::oracle_kerr || kind == ModelKind::oracle_bose_hubbard ||
         kind == ModelKind::oracle_fermi_hubbard;
}

std::size_t ScheduleConfig::steps() const { return static_cast<std::size_t>(std::llround(span / dt)); }
std::size_t ScheduleConfig::stride() const {
  return static_cast<std::size_t>(std::llround(record_every / dt));
}

void validate(const RunConfig& c) {
  const bool th = thermal(c.model);
  const std::string dt_key = th ? "schedule.d_tau" : "schedule.dt";
  const std::string span_key = th ? "schedule.tau_max" : "schedule.span";
  require(c.schedule.dt > 0.0, dt_key, "must be > 0");
  require(c.schedule.span > 0.0, span_key, "must be > 0");
  require(c.schedule.record_every > 0.0, "schedule.record_every", "must be > 0");
  whole_ratio(c.schedule.record_every, c.schedule.dt, "schedule.record_every");
  whole_ratio(c.schedule.span, c.schedule.record_every, span_key);

  require(c.ensemble.trajectories >= 1, "ensemble.trajectories", "must be >= 1");
  require(c.ensemble.n_sub >= 2, "ensemble.n_sub", "must be >= 2");
  require(static_cast<std::size_t>(c.ensemble.n_sub) <= c.ensemble.trajectories,
          "ensemble.n_sub", "must not exceed ensemble.trajectories");

  require(!c.output.path.empty(), "output.path", "must not be empty");

  const auto& e = c.engine;
  require(e.divergence_threshold > 0.0, "engine.divergence_threshold", "must be > 0");
  require(e.abort_floor >= 0.0 && e.abort_floor <= 1.0, "engine.abort_floor",
          "must lie in [0, 1]");
  require(e.workers >= 1, "engine.workers", "must be >= 1");
  require(e.noise_refinement >= 1, "engine.noise_refinement", "must be >= 1");
  require(e.midpoint_iterations >= 1, "engine.midpoint_iterations", "must be >= 1");
  require(e.midpoint_tolerance > 0.0, "engine.midpoint_tolerance", "must be > 0");

  switch (c.model) {
    case ModelKind::kerr:
    case ModelKind::oracle_kerr:
      require(c.kerr.n_mean > 0.0, "params.n_mean", "must be > 0");
      require(c.kerr.gauge == "none" || c.kerr.gauge == "real_drift", "params.gauge",
              "must be none or real_drift");
      break;
    case ModelKind::bose_hubbard_pp:
    case ModelKind::bose_hubbard_wigner:
    case ModelKind::oracle_bose_hubbard:
      require(c.bose.modes >= 1, "params.modes", "must be >= 1");
      require(c.bose.chi >= 0.0, "params.chi", "must be >= 0");
      require(c.bose.alpha.size() == c.bose.modes, "params.alpha",
              "needs one amplitude per mode");
      require(c.bose.gauge == "none" || c.bose.gauge == "real_drift", "params.gauge",
              "must be none or real_drift");
      break;
    case ModelKind::collision:
      require(c.collision.modes >= 3, "params.modes", "must be >= 3");
      require(c.collision.chi >= 0.0, "params.chi", "must be >= 0");
      require(c.collision.atoms > 0.0, "params.atoms", "must be > 0");
      require(c.collision.trap_curvature >= 0.0, "params.trap_curvature", "must be >= 0");
      require(2 * c.collision.packet_index < c.collision.modes, "params.packet_index",
              "must be below modes / 2");
      require(2 * c.collision.seed_index < c.collision.modes, "params.seed_index",
              "must be below modes / 2");
      require(c.collision.seed_fraction >= 0.0 && c.collision.seed_fraction < 1.0,
              "params.seed_fraction", "must lie in [0, 1)");
      break;
    case ModelKind::fermi_hubbard:
    case ModelKind::oracle_fermi_hubbard: {
      const auto& f = c.fermi;
      require(f.lattice == "chain" || f.lattice == "rectangle", "params.lattice",
              "must be chain or rectangle");
      if (f.lattice == "chain") {
        require(f.sites >= 1, "params.sites", "must be >= 1");
      } else {
        require(f.lx >= 1 && f.ly >= 1, "params.lx", "lx and ly must be >= 1");
      }
      if (c.model == ModelKind::fermi_hubbard) {
        require(f.U > 0.0, "params.U", "must be > 0 for the phase-space mapping");
      } else {
        require(f.U >= 0.0, "params.U", "must be >= 0");
      }
      break;
    }
  }
}

RunConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "document must be a JSON object");

  const std::set<std::string_view> sections{"model", "params", "schedule",
                                            "ensemble", "output", "engine"};
  for (const auto& [key, value] : doc.items()) {
    if (!sections.contains(key)) throw ConfigError(key, "unknown key");
  }

  RunConfig c;
  if (!doc.contains("model")) throw ConfigError("model", "missing");
  if (!doc["model"].is_string()) throw ConfigError("model", "must be a string");
  c.model = model_from_string(doc["model"].get<std::string>());

  Section params(doc, "params");
  switch (c.model) {
    case ModelKind::kerr:
    case ModelKind::oracle_kerr:
      if (c.model == ModelKind::kerr) {
        params.allow({"n_mean", "omega", "gauge", "time_reversal"});
      } else {
        params.allow({"n_mean", "omega"});
      }
      params.number("n_mean", c.kerr.n_mean);
      params.number("omega", c.kerr.omega);
      params.text("gauge", c.kerr.gauge);
      params.flag("time_reversal", c.kerr.time_reversal);
      break;
    case ModelKind::bose_hubbard_pp:
    case ModelKind::bose_hubbard_wigner:
    case ModelKind::oracle_bose_hubbard:
      if (c.model == ModelKind::bose_hubbard_pp) {
        params.allow({"modes", "hopping", "chi", "onsite", "periodic", "alpha", "gauge"});
      } else {
        params.allow({"modes", "hopping", "chi", "onsite", "periodic", "alpha"});
      }
      params.count("modes", c.bose.modes);
      params.number("hopping", c.bose.hopping);
      params.number("chi", c.bose.chi);
      params.number("onsite", c.bose.onsite);
      params.flag("periodic", c.bose.periodic);
      params.amplitudes("alpha", c.bose.alpha);
      params.text("gauge", c.bose.gauge);
      break;
    case ModelKind::collision:
      params.allow({"modes", "hopping", "chi", "atoms", "trap_curvature", "packet_index",
                    "seed_index", "seed_fraction"});
      params.count("modes", c.collision.modes);
      params.number("hopping", c.collision.hopping);
      params.number("chi", c.collision.chi);
      params.number("atoms", c.collision.atoms);
      params.number("trap_curvature", c.collision.trap_curvature);
      params.count("packet_index", c.collision.packet_index);
      params.count("seed_index", c.collision.seed_index);
      params.number("seed_fraction", c.collision.seed_fraction);
      break;
    case ModelKind::fermi_hubbard:
    case ModelKind::oracle_fermi_hubbard:
      if (c.model == ModelKind::fermi_hubbard) {
        params.allow({"lattice", "sites", "lx", "ly", "t", "U", "mu", "periodic", "extrapolate"});
      } else {
        params.allow({"lattice", "sites", "lx", "ly", "t", "U", "mu", "periodic"});
      }
      params.text("lattice", c.fermi.lattice);
      params.count("sites", c.fermi.sites);
      params.count("lx", c.fermi.lx);
      params.count("ly", c.fermi.ly);
      params.number("t", c.fermi.t);
      params.number("U", c.fermi.U);
      params.number("mu", c.fermi.mu);
      params.flag("periodic", c.fermi.periodic);
      params.flag("extrapolate", c.fermi.extrapolate);
      break;
  }

  c.schedule = default_schedule(c.model);
  Section schedule(doc, "schedule");
  if (thermal(c.model)) {
    schedule.allow({"d_tau", "tau_max", "record_every"});
    schedule.number("d_tau", c.schedule.dt);
    schedule.number("tau_max", c.schedule.span);
  } else {
    schedule.allow({"dt", "span", "record_every"});
    schedule.number("dt", c.schedule.dt);
    schedule.number("span", c.schedule.span);
  }
  schedule.number("record_every", c.schedule.record_every);

  Section ensemble(doc, "ensemble");
  ensemble.allow({"trajectories", "seed", "n_sub"});
  ensemble.count("trajectories", c.ensemble.trajectories);
  ensemble.seed("seed", c.ensemble.seed);
  ensemble.integer("n_sub", c.ensemble.n_sub);

  Section output(doc, "output");
  output.allow({"path", "format"});
  output.text("path", c.output.path);
  std::string format = "csv";
  output.text("format", format);
  if (format == "csv") {
    c.output.format = OutputFormat::csv;
  } else if (format == "json") {
    c.output.format = OutputFormat::json;
  } else {
    throw ConfigError("output.format", "must be csv or json");
  }

  Section engine(doc, "engine");
  engine.allow({"stepper", "divergence_threshold", "abort_floor", "workers",
                "noise_refinement", "midpoint_iterations", "midpoint_tolerance"});
  std::string stepper = to_string(c.engine.stepper);
  engine.text("stepper", stepper);
  try {
    c.engine.stepper = stepper_from_string(stepper);
  } catch (const Error&) {
    throw ConfigError("engine.stepper", "must be euler or midpoint");
  }
  engine.number("divergence_threshold", c.engine.divergence_threshold);
  engine.number("abort_floor", c.engine.abort_floor);
  engine.count("workers", c.engine.workers);
  engine.integer("noise_refinement", c.engine.noise_refinement);
  engine.integer("midpoint_iterations", c.engine.midpoint_iterations);
  engine.number("midpoint_tolerance", c.engine.midpoint_tolerance);

  validate(c);
  return c;
}

std::string dump_config(const RunConfig& c, int indent) {
  Json doc;
  doc["model"] = std::string(to_string(c.model));
  Json p = Json::object();
  switch (c.model) {
    case ModelKind::kerr:
    case ModelKind::oracle_kerr:
      p["n_mean"] = c.kerr.n_mean;
      p["omega"] = c.kerr.omega;
      if (c.model == ModelKind::kerr) {
        p["gauge"] = c.kerr.gauge;
        p["time_reversal"] = c.kerr.time_reversal;
      }
      break;
    case ModelKind::bose_hubbard_pp:
    case ModelKind::bose_hubbard_wigner:
    case ModelKind::oracle_bose_hubbard: {
      p["modes"] = c.bose.modes;
      p["hopping"] = c.bose.hopping;
      p["chi"] = c.bose.chi;
      p["onsite"] = c.bose.onsite;
      p["periodic"] = c.bose.periodic;
      Json a = Json::array();
      for (Complex z : c.bose.alpha) a.push_back(Json::array({z.real(), z.imag()}));
      p["alpha"] = a;
      if (c.model == ModelKind::bose_hubbard_pp) p["gauge"] = c.bose.gauge;
      break;
    }
    case ModelKind::collision:
      p["modes"] = c.collision.modes;
      p["hopping"] = c.collision.hopping;
      p["chi"] = c.collision.chi;
      p["atoms"] = c.collision.atoms;
      p["trap_curvature"] = c.collision.trap_curvature;
      p["packet_index"] = c.collision.packet_index;
      p["seed_index"] = c.collision.seed_index;
      p["seed_fraction"] = c.collision.seed_fraction;
      break;
    case ModelKind::fermi_hubbard:
    case ModelKind::oracle_fermi_hubbard:
      p["lattice"] = c.fermi.lattice;
      if (c.fermi.lattice == "chain") {
        p["sites"] = c.fermi.sites;
      } else {
        p["lx"] = c.fermi.lx;
        p["ly"] = c.fermi.ly;
      }
      p["t"] = c.fermi.t;
      p["U"] = c.fermi.U;
      p["mu"] = c.fermi.mu;
      p["periodic"] = c.fermi.periodic;
      if (c.model == ModelKind::fermi_hubbard) p["extrapolate"] = c.fermi.extrapolate;
      break;
  }
  doc["params"] = p;

  if (thermal(c.model)) {
    doc["schedule"] = {{"d_tau", c.schedule.dt},
                       {"tau_max", c.schedule.span},
                       {"record_every", c.schedule.record_every}};
  } else {
    doc["schedule"] = {{"dt", c.schedule.dt},
                       {"span", c.schedule.span},
                       {"record_every", c.schedule.record_every}};
  }
  doc["ensemble"] = {{"trajectories", c.ensemble.trajectories},
                     {"seed", c.ensemble.seed},
                     {"n_sub", c.ensemble.n_sub}};
  doc["output"] = {{"path", c.output.path},
                   {"format", c.output.format == OutputFormat::csv ? "csv" : "json"}};
  doc["engine"] = {{"stepper", to_string(c.engine.stepper)},
                   {"divergence_threshold", c.engine.divergence_threshold},
                   {"abort_floor", c.engine.abort_floor},
                   {"workers", c.engine.workers},
                   {"noise_refinement", c.engine.noise_refinement},
                   {"midpoint_iterations", c.engine.midpoint_iterations},
                   {"midpoint_tolerance", c.engine.midpoint_tolerance}};
  return doc.dump(indent);
}

}  // namespace phasespace
