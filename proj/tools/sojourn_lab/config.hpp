#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Schema violation; what() starts with the dotted field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Scenario { Width, Sojourn, FgrSweep, Floquet, AcStark, Multistate, Verify };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);

struct SolverCfg {
  double width_tol = 1e-10;
  int max_iterations = 200;
  double bound_rel_tol = 0.02;  // relative slack on sojourn >= 1/dE style bounds
};

struct LorentzianCfg {
  double E_r = 0.0;
  double Gamma = 1.0;
  int n = 0;  // 0: analytic only
  double cutoff = 50.0;  // in units of Gamma
};

/// Flat band of n_levels on [band_lo, band_hi]; coupling g(E) = sum_k c_k (E - E0)^k.
struct BandCfg {
  double E0 = 0.0;
  double band_lo = -4.0;
  double band_hi = 4.0;
  int n_levels = 400;
  std::vector<double> coupling{1.0};
};

struct MatrixCfg {
  std::vector<std::vector<double>> re;
  std::vector<std::vector<double>> im;  // empty for real matrices
  std::vector<double> psi;              // normalized on load
};

enum class ModelKind { Lorentzian, WignerWeisskopf, Matrix };

struct ModelCfg {
  ModelKind kind = ModelKind::WignerWeisskopf;
  LorentzianCfg lorentzian;
  BandCfg band;
  MatrixCfg matrix;
};

struct DrivenCfg {
  int n_cont = 80;
  double band_lo = 0.0;
  double band_hi = 4.0;
  double E0 = -1.0;
  double E1 = -2.3;
  double g2 = 3.8;
  double c_bound = 0.3;
  double omega = 2.0274;
  int N = 16;
  double kappa = 0.1;
  double horizon_fraction = 0.4;
  int n_t0 = 8;
  int steps_per_period = 64;
  int howland_steps = 256;
  int howland_times = 8;
  double howland_tol = 1e-4;
};

struct Harmonic {
  int n = 1;
  double re = 0.0;
  double im = 0.0;
};

struct AcStarkCfg {
  int n = 800;
  double L = 80.0;
  double depth = 1.0;
  double width = 1.0;
  std::vector<Harmonic> field{{1, 0.5 * 0.955336489125606, 0.5 * 0.29552020666133955}};
  double omega = 1.0;
  double kappa = 0.05;
  int N = 0;
  std::vector<double> etas{0.05, 0.1, 0.2};
  double t0 = 0.3;
  std::vector<int> steps{64, 128, 256};
  double cross_check_tol = 0.02;
  double gauge_tol = 5e-6;
  double order_tol = 0.3;
};

struct TwoChannelCfg {
  std::vector<double> bound_levels{-6.0, 0.0, 6.0};
  int bound_index = 1;
  std::vector<double> couplings{0.8, 2.0, 0.8};  // g_i, V(i, m) = g_i sqrt(spacing)
  int n2 = 2000;
  double band_lo = -4.0;
  double band_hi = 4.0;
};

struct VerifyCfg {
  int trials = 100;
  int max_dim = 30;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  Scenario scenario = Scenario::Verify;
  SolverCfg solver;
  ModelCfg model;
  DrivenCfg driven;
  AcStarkCfg ac_stark;
  TwoChannelCfg two_channel;
  VerifyCfg verify;

  double kappa = 0.1;                      // single-kappa scenarios
  std::vector<double> kappas{0.02, 0.04, 0.08, 0.16};
  std::vector<double> lambdas;             // empty: model default
  std::vector<double> eps;                 // sojourn lemma / regularized sojourn
  std::optional<double> eta;               // empty: smallest default eta
  double eta_floor = 3.0;                  // window lower end in level spacings
  double eta_ceiling = 0.1;                // window upper end as a fraction of the bandwidth
  double horizon_fraction = 0.4;           // of the Heisenberg time
  std::optional<double> horizon;           // absolute, overrides the fraction
  std::optional<double> expected_slope;    // fgr-sweep / multistate: assert |slope - s| <= tol
  double slope_tol = 0.05;

  std::string report_name;  // file names inside the output directory
  std::string table_name;
  std::uint64_t seed = 1;

  json canonical;  // the validated input, echoed into the report
};

/// Validates against the schema for the given scenario. Unknown fields are rejected.
ScenarioConfig parse_config(const json& doc, Scenario scenario);
ScenarioConfig load_config(const std::string& path, Scenario scenario);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace lab
