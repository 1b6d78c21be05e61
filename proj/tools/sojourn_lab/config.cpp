#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lab {

namespace {

/// Walks one JSON object, remembering which keys were read so leftovers can be reported.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where(), "must be an object");
  }
  ~Reader() = default;

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }
  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) out = as_number(*v, where(key));
  }
  void positive(const std::string& key, double& out) {
    number(key, out);
    if (has(key) && !(out > 0.0)) throw ConfigError(where(key), "must be positive (got " + show(out) + ")");
  }
  void nonnegative(const std::string& key, double& out) {
    number(key, out);
    if (has(key) && !(out >= 0.0))
      throw ConfigError(where(key), "must be nonnegative (got " + show(out) + ")");
  }
  void optional_positive(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    double v = 0.0;
    positive(key, v);
    out = v;
  }
  void integer(const std::string& key, int& out, int min_value) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_number_integer()) throw ConfigError(where(key), "must be an integer");
    const long long x = v->get<long long>();
    if (x < min_value || x > 100000000)
      throw ConfigError(where(key), "must be an integer >= " + std::to_string(min_value));
    out = static_cast<int>(x);
  }
  void string(const std::string& key, std::string& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_string()) throw ConfigError(where(key), "must be a string");
    out = v->get<std::string>();
  }
  void numbers(const std::string& key, std::vector<double>& out, bool positive_only, bool allow_empty) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array()) throw ConfigError(where(key), "must be an array of numbers");
    std::vector<double> xs;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string p = where(key) + "[" + std::to_string(i) + "]";
      const double x = as_number((*v)[i], p);
      if (positive_only && !(x > 0.0)) throw ConfigError(p, "must be positive (got " + show(x) + ")");
      xs.push_back(x);
    }
    if (xs.empty() && !allow_empty) throw ConfigError(where(key), "must not be empty");
    out = std::move(xs);
  }
  void integers(const std::string& key, std::vector<int>& out, int min_value) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array() || v->empty()) throw ConfigError(where(key), "must be a non-empty array of integers");
    std::vector<int> xs;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string p = where(key) + "[" + std::to_string(i) + "]";
      if (!(*v)[i].is_number_integer() || (*v)[i].get<long long>() < min_value)
        throw ConfigError(p, "must be an integer >= " + std::to_string(min_value));
      xs.push_back((*v)[i].get<int>());
    }
    out = std::move(xs);
  }
  Reader child(const std::string& key) {
    const json* v = get(key);
    static const json empty = json::object();
    return Reader(v ? *v : empty, where(key));
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()), "unknown field");
  }

  static std::string show(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }

 private:
  static double as_number(const json& v, const std::string& p) {
    if (!v.is_number()) throw ConfigError(p, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(p, "must be finite");
    return x;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_solver(Reader r, SolverCfg& s) {
  r.positive("width_tol", s.width_tol);
  r.integer("max_iterations", s.max_iterations, 1);
  r.nonnegative("bound_rel_tol", s.bound_rel_tol);
  if (s.bound_rel_tol >= 1.0) throw ConfigError(r.where("bound_rel_tol"), "must be below 1");
  r.finish();
}

void read_band(Reader& r, BandCfg& b) {
  r.number("E0", b.E0);
  r.number("band_lo", b.band_lo);
  r.number("band_hi", b.band_hi);
  r.integer("n_levels", b.n_levels, 1);
  r.numbers("coupling", b.coupling, false, false);
  if (!(b.band_lo < b.band_hi)) throw ConfigError(r.where("band_hi"), "must exceed band_lo");
  if (!(b.band_lo < b.E0 && b.E0 < b.band_hi)) throw ConfigError(r.where("E0"), "must lie inside the band");
}

void read_matrix(Reader& r, MatrixCfg& m) {
  auto rows = [&](const std::string& key, std::vector<std::vector<double>>& out) {
    const json* v = r.get(key);
    if (!v) return;
    if (!v->is_array() || v->empty()) throw ConfigError(r.where(key), "must be a non-empty array of rows");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string p = r.where(key) + "[" + std::to_string(i) + "]";
      if (!(*v)[i].is_array()) throw ConfigError(p, "must be an array of numbers");
      std::vector<double> row;
      for (std::size_t j = 0; j < (*v)[i].size(); ++j) {
        const json& x = (*v)[i][j];
        if (!x.is_number()) throw ConfigError(p + "[" + std::to_string(j) + "]", "must be a number");
        row.push_back(x.get<double>());
      }
      out.push_back(std::move(row));
    }
  };
  rows("H", m.re);
  rows("H_imag", m.im);
  if (m.re.empty()) throw ConfigError(r.where("H"), "is required");
  const std::size_t d = m.re.size();
  for (std::size_t i = 0; i < d; ++i)
    if (m.re[i].size() != d) throw ConfigError(r.where("H") + "[" + std::to_string(i) + "]", "matrix must be square");
  if (!m.im.empty()) {
    if (m.im.size() != d) throw ConfigError(r.where("H_imag"), "must match the shape of H");
    for (std::size_t i = 0; i < d; ++i)
      if (m.im[i].size() != d) throw ConfigError(r.where("H_imag") + "[" + std::to_string(i) + "]", "must match the shape of H");
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double im_ij = m.im.empty() ? 0.0 : m.im[i][j], im_ji = m.im.empty() ? 0.0 : m.im[j][i];
      if (std::abs(m.re[i][j] - m.re[j][i]) + std::abs(im_ij + im_ji) > 1e-12 * (1.0 + std::abs(m.re[i][j])))
        throw ConfigError(r.where("H"), "must be Hermitian (entry " + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  r.numbers("psi", m.psi, false, false);
  if (m.psi.size() != d) throw ConfigError(r.where("psi"), "must have " + std::to_string(d) + " entries");
  double n2 = 0.0;
  for (double x : m.psi) n2 += x * x;
  if (!(n2 > 0.0)) throw ConfigError(r.where("psi"), "must be nonzero");
  for (double& x : m.psi) x /= std::sqrt(n2);
}

void read_model(Reader r, ModelCfg& m, Scenario sc) {
  std::string kind = "wigner_weisskopf";
  r.string("kind", kind);
  if (kind == "lorentzian") {
    if (sc == Scenario::FgrSweep) throw ConfigError(r.where("kind"), "fgr-sweep needs an operator model");
    m.kind = ModelKind::Lorentzian;
    r.number("E_r", m.lorentzian.E_r);
    r.positive("Gamma", m.lorentzian.Gamma);
    r.integer("n", m.lorentzian.n, 0);
    r.positive("cutoff", m.lorentzian.cutoff);
  } else if (kind == "wigner_weisskopf") {
    m.kind = ModelKind::WignerWeisskopf;
    read_band(r, m.band);
  } else if (kind == "matrix") {
    if (sc == Scenario::FgrSweep) throw ConfigError(r.where("kind"), "fgr-sweep needs a wigner_weisskopf model");
    m.kind = ModelKind::Matrix;
    read_matrix(r, m.matrix);
  } else {
    throw ConfigError(r.where("kind"), "must be one of lorentzian, wigner_weisskopf, matrix (got \"" + kind + "\")");
  }
  r.finish();
}

void read_driven(Reader r, DrivenCfg& d) {
  r.integer("n_cont", d.n_cont, 2);
  r.number("band_lo", d.band_lo);
  r.number("band_hi", d.band_hi);
  if (!(d.band_lo < d.band_hi)) throw ConfigError(r.where("band_hi"), "must exceed band_lo");
  r.number("E0", d.E0);
  r.number("E1", d.E1);
  r.positive("g2", d.g2);
  r.number("c_bound", d.c_bound);
  r.positive("omega", d.omega);
  r.integer("N", d.N, 1);
  r.nonnegative("kappa", d.kappa);
  r.positive("horizon_fraction", d.horizon_fraction);
  r.integer("n_t0", d.n_t0, 1);
  r.integer("steps_per_period", d.steps_per_period, 1);
  r.integer("howland_steps", d.howland_steps, 1);
  r.integer("howland_times", d.howland_times, 1);
  r.positive("howland_tol", d.howland_tol);
  if (d.steps_per_period % d.n_t0 != 0)
    throw ConfigError(r.where("steps_per_period"), "must be a multiple of n_t0");
  r.finish();
}

void read_ac_stark(Reader r, AcStarkCfg& a) {
  r.integer("n", a.n, 8);
  r.positive("L", a.L);
  r.positive("depth", a.depth);
  r.positive("width", a.width);
  if (const json* f = r.get("field")) {
    if (!f->is_array() || f->empty()) throw ConfigError(r.where("field"), "must be a non-empty array");
    a.field.clear();
    for (std::size_t i = 0; i < f->size(); ++i) {
      Reader h((*f)[i], r.where("field") + "[" + std::to_string(i) + "]");
      Harmonic x;
      h.integer("n", x.n, 1);
      h.number("re", x.re);
      h.number("im", x.im);
      h.finish();
      for (const Harmonic& prev : a.field)
        if (prev.n == x.n) throw ConfigError(h.where("n"), "duplicate harmonic " + std::to_string(x.n));
      a.field.push_back(x);
    }
  }
  r.positive("omega", a.omega);
  r.nonnegative("kappa", a.kappa);
  r.integer("N", a.N, 0);
  r.numbers("etas", a.etas, true, false);
  r.number("t0", a.t0);
  r.integers("steps", a.steps, 1);
  if (a.steps.size() < 2) throw ConfigError(r.where("steps"), "needs at least two step counts");
  r.positive("cross_check_tol", a.cross_check_tol);
  r.positive("gauge_tol", a.gauge_tol);
  r.positive("order_tol", a.order_tol);
  r.finish();
}

void read_two_channel(Reader r, TwoChannelCfg& t) {
  r.numbers("bound_levels", t.bound_levels, false, false);
  r.integer("bound_index", t.bound_index, 0);
  r.numbers("couplings", t.couplings, false, false);
  r.integer("n2", t.n2, 1);
  r.number("band_lo", t.band_lo);
  r.number("band_hi", t.band_hi);
  if (!(t.band_lo < t.band_hi)) throw ConfigError(r.where("band_hi"), "must exceed band_lo");
  if (t.bound_index >= static_cast<int>(t.bound_levels.size()))
    throw ConfigError(r.where("bound_index"), "must index into bound_levels");
  if (t.couplings.size() != t.bound_levels.size())
    throw ConfigError(r.where("couplings"), "must have one entry per bound level");
  r.finish();
}

void read_verify(Reader r, VerifyCfg& v) {
  r.integer("trials", v.trials, 1);
  r.integer("max_dim", v.max_dim, 2);
  r.finish();
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  if (name == "width") return Scenario::Width;
  if (name == "sojourn") return Scenario::Sojourn;
  if (name == "fgr-sweep") return Scenario::FgrSweep;
  if (name == "floquet") return Scenario::Floquet;
  if (name == "ac-stark") return Scenario::AcStark;
  if (name == "multistate") return Scenario::Multistate;
  if (name == "verify") return Scenario::Verify;
  throw ConfigError("scenario", "unknown scenario \"" + name +
                                    "\" (width, sojourn, fgr-sweep, floquet, ac-stark, multistate, verify)");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Width: return "width";
    case Scenario::Sojourn: return "sojourn";
    case Scenario::FgrSweep: return "fgr-sweep";
    case Scenario::Floquet: return "floquet";
    case Scenario::AcStark: return "ac-stark";
    case Scenario::Multistate: return "multistate";
    case Scenario::Verify: return "verify";
  }
  return "?";
}

ScenarioConfig parse_config(const json& doc, Scenario scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.canonical = doc;
  Reader r(doc, "");
  r.integer("schema_version", c.schema_version, 0);
  if (!r.has("schema_version")) throw ConfigError("schema_version", "is required");
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version) +
                                            " (this build reads " + std::to_string(kSchemaVersion) + ")");
  std::string name = scenario_name(scenario);
  r.string("scenario", name);
  if (name != scenario_name(scenario))
    throw ConfigError("scenario", "config is for \"" + name + "\" but \"" + scenario_name(scenario) +
                                      "\" was requested");

  if (r.has("solver")) read_solver(r.child("solver"), c.solver);
  switch (scenario) {
    case Scenario::Width:
    case Scenario::Sojourn:
    case Scenario::FgrSweep:
      if (r.has("model")) read_model(r.child("model"), c.model, scenario);
      break;
    case Scenario::Floquet:
      if (r.has("model")) read_driven(r.child("model"), c.driven);
      break;
    case Scenario::AcStark:
      if (r.has("model")) read_ac_stark(r.child("model"), c.ac_stark);
      break;
    case Scenario::Multistate:
      if (r.has("model")) read_two_channel(r.child("model"), c.two_channel);
      break;
    case Scenario::Verify:
      if (r.has("model")) read_verify(r.child("model"), c.verify);
      break;
  }

  r.nonnegative("kappa", c.kappa);
  r.numbers("kappas", c.kappas, true, true);
  r.numbers("lambdas", c.lambdas, false, true);
  r.numbers("eps", c.eps, true, true);
  r.optional_positive("eta", c.eta);
  r.positive("eta_floor", c.eta_floor);
  r.positive("eta_ceiling", c.eta_ceiling);
  r.positive("horizon_fraction", c.horizon_fraction);
  r.optional_positive("horizon", c.horizon);
  if (r.has("expected_slope")) {
    double s = 0.0;
    r.number("expected_slope", s);
    c.expected_slope = s;
  }
  r.positive("slope_tol", c.slope_tol);
  if (const json* v = r.get("seed")) {
    if (!v->is_number_unsigned()) throw ConfigError("seed", "must be a nonnegative integer");
    c.seed = v->get<std::uint64_t>();
  }

  c.report_name = name + "_report.json";
  c.table_name = name + "_kappa_sweep.csv";
  if (r.has("output")) {
    Reader o = r.child("output");
    o.string("report", c.report_name);
    o.string("table", c.table_name);
    o.finish();
  }
  r.finish();
  return c;
}

ScenarioConfig load_config(const std::string& path, Scenario scenario) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open \"" + path + "\"");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc, scenario);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lab
