#include "app.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "sojourn/sojourn.hpp"

#ifndef SOJOURN_LAB_VERSION
#define SOJOURN_LAB_VERSION "0.0.0"
#endif

namespace lab {

using namespace sojourn;

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double from_num(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("not a report number: " + v.dump());
}

namespace {

constexpr double kPi = std::numbers::pi;

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }
json cnum(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

json nums(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

struct Checks {
  json list = json::array();
  bool ok = true;

  void add(const std::string& name, bool pass, double value, const std::string& relation,
           double bound) {
    list.push_back({{"name", name},
                    {"ok", pass},
                    {"value", num(value)},
                    {"relation", relation},
                    {"bound", num(bound)}});
    ok = ok && pass;
  }
};

std::string tag(const std::string& base, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s[%.6g]", base.c_str(), x);
  return buf;
}

WidthOptions width_opts(const ScenarioConfig& c) {
  return WidthOptions{c.solver.width_tol, c.solver.max_iterations};
}

PerturbedFamily band_family(const BandCfg& b) {
  WignerWeisskopfSpec s;
  s.E0 = b.E0;
  s.band_lo = b.band_lo;
  s.band_hi = b.band_hi;
  s.n_levels = b.n_levels;
  s.coupling = [c = b.coupling, E0 = b.E0](double E) {
    double g = 0.0, p = 1.0;
    for (double ck : c) {
      g += ck * p;
      p *= E - E0;
    }
    return g;
  };
  return wigner_weisskopf(s);
}

std::pair<HermitianOperator, State> matrix_model(const MatrixCfg& m) {
  const Eigen::Index d = static_cast<Eigen::Index>(m.re.size());
  Matrix A(d, d);
  Vector psi(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    psi[i] = m.psi[i];
    for (Eigen::Index j = 0; j < d; ++j)
      A(i, j) = cplx(m.re[i][j], m.im.empty() ? 0.0 : m.im[i][j]);
  }
  return {HermitianOperator(A), State::normalize(psi)};
}

double default_eta(const ScenarioConfig& c, const PerturbedFamily& fam) {
  return c.eta ? *c.eta : default_eta_list(fam).back();
}

json width_json(const WidthResult& w) {
  return {{"lambda", num(w.lambda)},
          {"delta_e", num(w.delta_e)},
          {"f_at_solution", num(w.f_at_solution)},
          {"iterations", w.iterations},
          {"zero_width", w.zero_width}};
}

json fgr_json(const FgrResult& r) {
  return {{"kappa", num(r.kappa)},
          {"lambda2", num(r.lambda2)},
          {"gamma_fgr", num(r.gamma_fgr)},
          {"eta", num(r.eta_used)}};
}

json lemma_json(const LemmaReport& r) {
  return {{"lhs", num(r.lhs)},
          {"truncated", num(r.truncated)},
          {"tail_bound", opt_num(r.tail_bound)},
          {"rhs", num(r.rhs)},
          {"ratio", num(r.ratio)},
          {"asserted", r.asserted},
          {"ok", r.ok},
          {"point_spectrum", r.point_spectrum}};
}

// ---------------------------------------------------------------- width

/// Width, uncertainty chain, Feshbach identity and fixed point at one lambda.
json width_point(const HermitianOperator& H, const State& psi, const FeshbachMap& fm,
                 double lambda, const ScenarioConfig& c, Checks& chk) {
  const WidthResult w = energy_width(fm.measure(), lambda, width_opts(c));
  json j = width_json(w);
  json samples = json::array();
  if (w.delta_e > 0.0)
    for (double s : {0.5, 1.0, 2.0}) {
      const double eps = s * w.delta_e;
      samples.push_back({{"eps", num(eps)}, {"f", num(width_function(fm.measure(), lambda, eps))}});
    }
  j["f_samples"] = samples;

  const EtupReport e = etup_chain(H, psi, lambda, c.solver.width_tol);
  j["etup"] = {{"delta_e", num(e.delta_e)},
               {"residual", num(e.residual)},
               {"t_lower_1", num(e.t_lower_1)},
               {"t_lower_2", num(e.t_lower_2)},
               {"chain_ok", e.chain_ok}};
  chk.add(tag("etup_chain", lambda), e.chain_ok && e.delta_e <= e.residual + c.solver.width_tol,
          e.delta_e, "<=", e.residual + c.solver.width_tol);

  if (w.delta_e > 0.0 && !w.zero_width) {
    const cplx z(lambda, w.delta_e);
    const double fres = fm.residual(z) / H.scale();
    const double fp = fm.fixed_point_residual(lambda, w.delta_e);
    j["feshbach"] = {{"z", cnum(z)},
                     {"lhs", cnum(fm.lhs(z))},
                     {"rhs", cnum(fm.rhs(z))},
                     {"residual_over_scale", num(fres)}};
    j["fixed_point_residual"] = num(fp);
    chk.add(tag("feshbach_identity", lambda), fres <= 1e-9, fres, "<=", 1e-9);
    chk.add(tag("fixed_point", lambda), fp <= 10.0 * c.solver.width_tol, fp, "<=",
            10.0 * c.solver.width_tol);
  }
  return j;
}

json run_width_lorentzian(const ScenarioConfig& c, Checks& chk) {
  const LorentzianCfg& lc = c.model.lorentzian;
  const LorentzianModel m(lc.E_r, lc.Gamma);
  const std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{m.E_r} : c.lambdas;
  json points = json::array();
  for (double lambda : lambdas) {
    const WidthResult w = lorentzian_energy_width(m, lambda);
    const double closed = lorentzian_width(m, lambda);
    json j = width_json(w);
    j["closed_form"] = num(closed);
    j["f_at_delta_e"] = num(lorentzian_f(m, lambda, w.delta_e));
    chk.add(tag("closed_form", lambda), std::abs(w.delta_e - closed) <= 1e-8 * m.Gamma,
            std::abs(w.delta_e - closed), "<=", 1e-8 * m.Gamma);
    if (lambda == m.E_r)
      chk.add("delta_e_equals_gamma_at_resonance", std::abs(w.delta_e - m.Gamma) <= 1e-8 * m.Gamma,
              w.delta_e, "==", m.Gamma);
    if (lc.n > 0) {
      // discretization convergence, reported only
      json table = json::array();
      for (int n : {lc.n / 4, lc.n / 2, lc.n}) {
        if (n < 2) continue;
        const SpectralMeasure mu = lorentzian_discretize(m, n, lc.cutoff * m.Gamma);
        const WidthResult wd = energy_width(mu, lambda, width_opts(c));
        table.push_back({{"n", n},
                         {"delta_e", num(wd.delta_e)},
                         {"error_over_gamma", num(std::abs(wd.delta_e - closed) / m.Gamma)}});
      }
      j["discretized"] = table;
    }
    points.push_back(j);
  }
  return {{"model", "lorentzian"}, {"points", points}};
}

json run_width(const ScenarioConfig& c, Checks& chk) {
  if (c.model.kind == ModelKind::Lorentzian) return run_width_lorentzian(c, chk);

  json res;
  std::optional<HermitianOperator> H;
  std::optional<State> psi;
  std::vector<double> lambdas = c.lambdas;
  if (c.model.kind == ModelKind::WignerWeisskopf) {
    const PerturbedFamily fam = band_family(c.model.band);
    H = fam.H(c.kappa);
    psi = fam.psi();
    const double eta = default_eta(c, fam);
    const FgrResult f = fgr_width(fam, c.kappa, eta);
    res["model"] = "wigner_weisskopf";
    res["kappa"] = num(c.kappa);
    res["fgr"] = fgr_json(f);
    if (lambdas.empty()) lambdas.push_back(f.lambda2);
  } else {
    auto [A, p] = matrix_model(c.model.matrix);
    H = A;
    psi = p;
    res["model"] = "matrix";
  }
  const FeshbachMap fm(*H, *psi);
  res["expectation"] = num(fm.expectation());
  if (lambdas.empty()) lambdas.push_back(fm.expectation());

  const SpectralMeasure& mu = fm.measure();
  const BestLambda bl =
      best_lambda(mu, mu.min_energy(), mu.max_energy(), c.solver.width_tol);
  res["best_lambda"] = {{"lambda", num(bl.lambda)}, {"width", width_json(bl.width)}};

  json points = json::array();
  for (double lambda : lambdas) points.push_back(width_point(*H, *psi, fm, lambda, c, chk));
  res["points"] = points;
  return res;
}

// ---------------------------------------------------------------- sojourn

json run_sojourn(const ScenarioConfig& c, Checks& chk) {
  const double rel = c.solver.bound_rel_tol;
  json res;
  if (c.model.kind == ModelKind::Lorentzian) {
    const LorentzianModel m(c.model.lorentzian.E_r, c.model.lorentzian.Gamma);
    const double horizon = c.horizon.value_or(30.0 / m.Gamma);
    const std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{m.E_r} : c.lambdas;
    const std::vector<double> epss =
        c.eps.empty() ? std::vector<double>{0.5 * m.Gamma, m.Gamma, 2.0 * m.Gamma} : c.eps;
    res["model"] = "lorentzian";
    res["horizon"] = num(horizon);
    json points = json::array();
    for (double lambda : lambdas) {
      const double dE = lorentzian_width(m, lambda);
      json lemmas = json::array();
      double sojourn = 0.0;
      for (double eps : epss) {
        const LemmaReport r = lorentzian_lemma_check(m, lambda, eps, horizon);
        sojourn = r.lhs;
        json lj = lemma_json(r);
        lj["eps"] = num(eps);
        lemmas.push_back(lj);
        if (r.asserted) chk.add(tag("lemma", eps), r.ok, r.lhs, ">=", r.rhs);
      }
      chk.add(tag("sojourn_lower_bound", lambda), sojourn * dE >= 1.0 - rel, sojourn, ">=",
              (1.0 - rel) / dE);
      points.push_back({{"lambda", num(lambda)},
                        {"delta_e", num(dE)},
                        {"sojourn_lb", num(1.0 / dE)},
                        {"sojourn", num(sojourn)},
                        {"lemma", lemmas}});
    }
    res["points"] = points;
    return res;
  }

  std::optional<HermitianOperator> H;
  std::optional<State> psi;
  std::vector<double> lambdas = c.lambdas;
  const bool continuum = c.model.kind == ModelKind::WignerWeisskopf;
  if (continuum) {
    const PerturbedFamily fam = band_family(c.model.band);
    H = fam.H(c.kappa);
    psi = fam.psi();
    const FgrResult f = fgr_width(fam, c.kappa, default_eta(c, fam));
    res["model"] = "wigner_weisskopf";
    res["kappa"] = num(c.kappa);
    res["fgr"] = fgr_json(f);
    if (lambdas.empty()) lambdas.push_back(f.lambda2);
  } else {
    auto [A, p] = matrix_model(c.model.matrix);
    H = A;
    psi = p;
    res["model"] = "matrix";
  }
  const SpectralMeasure mu = spectral_measure(*H, *psi);
  if (lambdas.empty()) lambdas.push_back(mu.mean());
  const double TH = heisenberg_time(mu);
  const double horizon = c.horizon ? *c.horizon : (std::isfinite(TH) ? c.horizon_fraction * TH : 0.0);
  if (!(horizon > 0.0))
    throw ConfigError("horizon", "required when the measure has a single point (no Heisenberg time)");
  const SojournEstimate est = sojourn_truncated(mu, horizon);
  res["horizon"] = num(horizon);
  res["heisenberg_time"] = num(TH);
  res["sojourn_truncated"] = {{"value", num(est.value)},
                              {"nodes", est.nodes},
                              {"tail_bound", opt_num(est.tail_bound)},
                              {"recurrence_warning", est.recurrence_warning}};

  json points = json::array();
  for (double lambda : lambdas) {
    const WidthResult w = energy_width(mu, lambda, width_opts(c));
    json p = {{"lambda", num(lambda)}, {"width", width_json(w)}};
    const double lb = w.delta_e > 0.0 ? 1.0 / w.delta_e : std::numeric_limits<double>::infinity();
    p["sojourn_lb"] = num(lb);
    // Only a quasi-continuum below the recurrence time has a truncated sojourn that should
    // already sit above 1/dE; for small matrices the comparison is reported.
    const bool asserted = continuum && !est.recurrence_warning && w.delta_e > 0.0;
    p["bound_asserted"] = asserted;
    if (asserted)
      chk.add(tag("sojourn_lower_bound", lambda), est.value * w.delta_e >= 1.0 - rel, est.value,
              ">=", (1.0 - rel) * lb);

    std::vector<double> epss = c.eps;
    if (epss.empty()) {
      const double base = w.delta_e > 0.0 ? w.delta_e : 0.1 * std::max(H->scale(), 1.0);
      for (int k = -2; k <= 2; ++k) epss.push_back(base * std::pow(10.0, 0.5 * k));
    }
    json lemmas = json::array();
    for (double eps : epss) {
      const LemmaReport r = lemma_bound_check(mu, lambda, eps, horizon);
      const double reg = sojourn_regularized(mu, eps);
      const double reg_bound = est.value + std::exp(-2.0 * eps * horizon) / eps;
      json lj = lemma_json(r);
      lj["eps"] = num(eps);
      lj["regularized"] = num(reg);
      lemmas.push_back(lj);
      if (r.asserted) chk.add(tag("lemma", eps), r.ok, r.lhs, ">=", r.rhs);
      chk.add(tag("regularized_below_truncated_plus_tail", eps), reg <= reg_bound * (1.0 + 1e-12),
              reg, "<=", reg_bound);
    }
    p["lemma"] = lemmas;
    points.push_back(p);
  }
  res["points"] = points;
  return res;
}

// ---------------------------------------------------------------- sweeps

json sweep_row(double kappa, double lambda2, double gamma, double delta_e, double sojourn_lb,
               std::optional<double> sojourn_trunc, double ratio) {
  return {{"kappa", num(kappa)},           {"lambda2", num(lambda2)},
          {"gamma_fgr", num(gamma)},       {"delta_e", num(delta_e)},
          {"sojourn_lb", num(sojourn_lb)}, {"sojourn_trunc", opt_num(sojourn_trunc)},
          {"ratio", num(ratio)}};
}

std::vector<double> eta_list(const ScenarioConfig& c, const PerturbedFamily& fam,
                             const EtaWindow& win) {
  if (c.eta_floor == 3.0 && c.eta_ceiling == 0.1) return default_eta_list(fam);
  if (win.empty()) return {};
  std::vector<double> etas;
  const int count = 6;
  for (int k = 0; k < count; ++k)
    etas.push_back(win.hi * std::pow(win.lo / win.hi, static_cast<double>(k) / (count - 1)));
  return etas;
}

json window_json(const EtaWindow& w) {
  return {{"lo", num(w.lo)}, {"hi", num(w.hi)}, {"floor_factor", num(w.floor_factor)},
          {"ceiling_fraction", num(w.ceiling_fraction)}};
}

void slope_check(const ScenarioConfig& c, double slope, Checks& chk) {
  if (c.expected_slope)
    chk.add("kappa_slope", std::abs(slope - *c.expected_slope) <= c.slope_tol, slope, "~=",
            *c.expected_slope);
}

json run_fgr_sweep(const ScenarioConfig& c, Checks& chk) {
  const PerturbedFamily fam = band_family(c.model.band);
  const EtaWindow win = admissible_window(fam, c.eta_floor, c.eta_ceiling);
  const std::vector<double> etas = eta_list(c, fam, win);
  if (!c.eta && etas.empty())
    throw ConfigError("eta_floor", "admissible eta window is empty for this discretization");
  const double eta = c.eta ? *c.eta : etas.back();

  json res = {{"model", "wigner_weisskopf"},
              {"spacing", num(fam.local_spacing())},
              {"bandwidth", num(fam.bandwidth())},
              {"eta", num(eta)},
              {"eta_in_window", eta >= win.lo && eta <= win.hi},
              {"window", window_json(win)},
              {"etas", nums(etas)}};

  json rows = json::array(), fits = json::array();
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = slope;
  if (!c.kappas.empty()) {
    SweepOptions opt;
    opt.width = width_opts(c);
    opt.sojourn = true;
    opt.horizon_fraction = c.horizon_fraction;
    const SweepResult sw = kappa_sweep(fam, c.kappas, eta, opt);
    if (sw.rows.size() >= 2) {
      slope = sw.slope;
      intercept = sw.intercept;
    }
    for (const SweepRow& r : sw.rows) {
      rows.push_back(sweep_row(r.fgr.kappa, r.fgr.lambda2, r.fgr.gamma_fgr, r.delta_e, r.sojourn_lb,
                               r.sojourn_trunc, r.ratio));
      rows.back()["recurrence_warning"] = r.recurrence_warning;
      if (r.sojourn_trunc && !r.recurrence_warning && r.delta_e > 0.0)
        chk.add(tag("sojourn_lower_bound", r.fgr.kappa),
                *r.sojourn_trunc * r.delta_e >= 1.0 - c.solver.bound_rel_tol, *r.sojourn_trunc,
                ">=", (1.0 - c.solver.bound_rel_tol) * r.sojourn_lb);
      if (!etas.empty() && r.fgr.kappa > 0.0) {
        const EtaFit f = eta_extrapolation(fam, r.fgr.kappa, etas, win);
        fits.push_back({{"kappa", num(r.fgr.kappa)},
                        {"gamma_limit", num(f.gamma_limit)},
                        {"slope", num(f.slope)},
                        {"quality", num(f.quality)},
                        {"gammas", nums(f.gammas)}});
      }
    }
  }
  res["sweep"] = {{"rows", rows}, {"slope", num(slope)}, {"intercept", num(intercept)}};
  res["eta_extrapolation"] = fits;
  if (std::isfinite(slope)) slope_check(c, slope, chk);
  return res;
}

// ---------------------------------------------------------------- floquet

FloquetProblem driven_problem(const DrivenCfg& d, int N, State& psi, double& spacing) {
  const int n = d.n_cont;
  spacing = (d.band_hi - d.band_lo) / n;
  const int dim = n + 2;
  RealVector diag(dim);
  diag[0] = d.E0;
  diag[1] = d.E1;
  for (int m = 0; m < n; ++m) diag[m + 2] = d.band_lo + (m + 0.5) * spacing;
  RealMatrix C = RealMatrix::Zero(dim, dim);
  for (int m = 0; m < n; ++m) C(0, m + 2) = C(m + 2, 0) = std::sqrt(d.g2 * spacing);
  C(0, 1) = C(1, 0) = d.c_bound;
  psi = State::basis(dim, 0);
  FloquetProblem fp{HermitianOperator::diagonal(diag),
                    symmetric_drive({{1, Matrix(C.cast<cplx>())}}), d.omega, N, d.kappa};
  fp.validate();
  return fp;
}

json run_floquet(const ScenarioConfig& c, Checks& chk) {
  const DrivenCfg& d = c.driven;
  State psi = State::basis(1, 0);
  double spacing = 0.0;
  const FloquetProblem fp = driven_problem(d, d.N, psi, spacing);
  check_non_resonance(fp, d.E0, psi);

  json res = {{"spacing", num(spacing)}, {"period", num(fp.period())}, {"N", d.N},
              {"default_truncation", default_truncation(fp)}};

  // Howland residual at N and N / 2 (truncation convergence)
  json howland = json::array();
  std::optional<HermitianOperator> K;
  double residual_N = 0.0;
  for (int N : {d.N / 2, d.N}) {
    if (N < 1 || (N == d.N / 2 && N == d.N)) continue;
    State p = psi;
    double s = 0.0;
    const FloquetProblem f = N == d.N ? fp : driven_problem(d, N, p, s);
    const HermitianOperator Kn = build_floquet(f);
    const HowlandReport hw =
        howland_check(f, Kn, {{0, psi.vec()}}, f.period(), d.howland_times, d.howland_steps);
    howland.push_back({{"N", N}, {"residual", num(hw.residual)}, {"residuals", nums(hw.residuals)}});
    if (N == d.N) {
      K = Kn;
      residual_N = hw.residual;
    }
  }
  res["howland"] = howland;
  chk.add("howland", residual_N <= d.howland_tol, residual_N, "<=", d.howland_tol);

  const SpectralMeasure mu = spectral_measure(*K, State(embed(fp, {{0, psi.vec()}})));
  const BestLambda bl = best_lambda(mu, d.E0 - 0.5 * d.omega, d.E0 + 0.5 * d.omega,
                                    c.solver.width_tol);
  res["floquet_width"] = {{"lambda", num(bl.lambda)}, {"width", width_json(bl.width)}};

  const double horizon = c.horizon.value_or(d.horizon_fraction * 2.0 * kPi / spacing);
  const AveragedSojourn av =
      averaged_sojourn(fp, *K, psi, horizon, d.n_t0, d.steps_per_period);
  res["averaged_sojourn"] = {{"infinite", av.infinite},   {"averaged", num(av.averaged)},
                             {"per_t0", nums(av.per_t0)}, {"floquet", num(av.floquet)},
                             {"jensen_ok", av.jensen_ok}, {"horizon", num(av.horizon)}};
  // a zero Floquet width means a bound Floquet state; the truncated average cannot confirm 1/0
  const bool asserted = !av.infinite && bl.width.delta_e > 0.0;
  res["averaged_sojourn"]["bound_asserted"] = asserted;
  if (asserted) {
    const double lb = 1.0 / bl.width.delta_e;
    chk.add("averaged_sojourn_lower_bound", av.averaged >= (1.0 - c.solver.bound_rel_tol) * lb,
            av.averaged, ">=", (1.0 - c.solver.bound_rel_tol) * lb);
  }
  if (!av.infinite) chk.add("jensen", av.jensen_ok, av.floquet, "<=", 1.01 * av.averaged);

  const double eta = c.eta.value_or(2.0 * c.eta_floor * spacing);
  res["floquet_fgr"] = {{"eta", num(eta)}, {"gamma", num(floquet_fgr(fp, psi, d.E0, eta))}};
  return res;
}

// ---------------------------------------------------------------- ac-stark

json run_ac_stark(const ScenarioConfig& c, Checks& chk) {
  const AcStarkCfg& a = c.ac_stark;
  const Grid1D grid{-a.L / 2.0, a.L / a.n, a.n, Boundary::Periodic};
  Potential1D W;
  W.value = [D = a.depth, w = a.width](double x) { return -D * std::exp(-0.5 * x * x / (w * w)); };
  W.derivative = [D = a.depth, w = a.width](double x) {
    return D * x / (w * w) * std::exp(-0.5 * x * x / (w * w));
  };
  std::map<int, cplx> F;
  for (const Harmonic& h : a.field) F[h.n] = cplx(h.re, h.im);
  const AcStarkScenario sc = ac_stark_scenario(grid, W, F, a.omega, a.kappa, a.N);

  json res = {{"E0", num(sc.E0)}, {"N", sc.problem.N}, {"period", num(sc.problem.period())}};
  json widths = json::array();
  for (double eta : a.etas) {
    const double eacs = eacs_width(sc, eta);
    const double fl = floquet_fgr(sc.problem, sc.psi, sc.E0, eta);
    const double rel = std::abs(eacs - fl) / std::max(std::abs(fl), 1e-300);
    widths.push_back({{"eta", num(eta)}, {"eacs", num(eacs)}, {"floquet_fgr", num(fl)},
                      {"relative_difference", num(rel)}});
    chk.add(tag("eacs_vs_floquet_fgr", eta), rel <= a.cross_check_tol, rel, "<=",
            a.cross_check_tol);
  }
  res["widths"] = widths;

  const double t1 = a.t0 + sc.problem.period();
  const GaugeConvergence gc = gauge_convergence(sc, a.t0, t1, a.steps);
  const GaugeReport last = gauge_equivalence_check(sc, a.t0, t1, a.steps.back());
  res["gauge"] = {{"t0", num(a.t0)},
                  {"t1", num(t1)},
                  {"steps", gc.steps},
                  {"residuals", nums(gc.residuals)},
                  {"order", num(gc.order)},
                  {"phase", num(last.phase)},
                  {"leakage", num(last.leakage)}};
  chk.add("gauge_residual", gc.residuals.back() <= a.gauge_tol, gc.residuals.back(), "<=",
          a.gauge_tol);
  chk.add("gauge_order", std::abs(gc.order - 2.0) <= a.order_tol, gc.order, "~=", 2.0);
  return res;
}

// ---------------------------------------------------------------- multistate

TwoChannelModel two_channel(const TwoChannelCfg& t, double kappa) {
  const Eigen::Index n1 = static_cast<Eigen::Index>(t.bound_levels.size());
  RealVector d1(n1);
  for (Eigen::Index i = 0; i < n1; ++i) d1[i] = t.bound_levels[i];
  const double s = (t.band_hi - t.band_lo) / t.n2;
  RealVector d2(t.n2);
  for (int m = 0; m < t.n2; ++m) d2[m] = t.band_lo + (m + 0.5) * s;
  Matrix V = Matrix::Zero(n1, t.n2);
  for (Eigen::Index i = 0; i < n1; ++i)
    for (int m = 0; m < t.n2; ++m) V(i, m) = t.couplings[i] * std::sqrt(s);
  TwoChannelModel m{HermitianOperator::diagonal(d1), HermitianOperator::diagonal(d2), V, kappa,
                    State::basis(n1, t.bound_index), t.bound_levels[t.bound_index]};
  m.validate();
  return m;
}

json run_multistate(const ScenarioConfig& c, Checks& chk) {
  const TwoChannelModel m0 = two_channel(c.two_channel, 1.0);
  const PerturbedFamily fam = to_family(m0);
  const double eta = default_eta(c, fam);
  json res = {{"eta", num(eta)}, {"E0", num(m0.E0)}, {"spacing", num(fam.local_spacing())}};

  json rows = json::array(), reports = json::array();
  std::vector<double> lk, le;
  for (double kappa : c.kappas) {
    const TwoChannelModel m = two_channel(c.two_channel, kappa);
    const double ms = ms_fgr(m, eta);
    const double ref = fgr_width(fam, kappa, eta).gamma_fgr;
    const double rel = std::abs(ms - ref) / std::max(std::abs(ref), 1e-300);
    chk.add(tag("ms_fgr_vs_fgr_width", kappa), rel <= 1e-9, rel, "<=", 1e-9);
    const MultistateReport r =
        ms_pipeline(m, eta, c.horizon_fraction, c.solver.bound_rel_tol, width_opts(c));
    reports.push_back({{"kappa", num(kappa)},
                       {"ms_fgr", num(ms)},
                       {"fgr_width", num(ref)},
                       {"relative_difference", num(rel)},
                       {"lambda2", num(r.lambda2)},
                       {"gamma_fgr", num(r.gamma_fgr)},
                       {"delta_e", num(r.delta_e)},
                       {"sojourn_lb", num(r.sojourn_lb)},
                       {"sojourn", num(r.sojourn)},
                       {"horizon", num(r.horizon)},
                       {"heisenberg_time", num(r.heisenberg_time)},
                       {"infinite", r.infinite},
                       {"bound_ok", r.bound_ok}});
    if (!r.infinite) chk.add(tag("sojourn_lower_bound", kappa), r.bound_ok, r.sojourn, ">=",
                             (1.0 - c.solver.bound_rel_tol) * r.sojourn_lb);
    const double ratio = r.gamma_fgr > 0.0 ? r.delta_e / r.gamma_fgr
                                           : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(sweep_row(kappa, r.lambda2, r.gamma_fgr, r.delta_e, r.sojourn_lb,
                             r.infinite ? std::nullopt : std::optional<double>(r.sojourn), ratio));
    if (kappa > 0.0 && r.delta_e > 0.0) {
      lk.push_back(std::log(kappa));
      le.push_back(std::log(r.delta_e));
    }
  }
  double slope = std::numeric_limits<double>::quiet_NaN(), intercept = slope;
  if (lk.size() >= 2) std::tie(slope, intercept) = linear_fit(lk, le);
  res["channels"] = reports;
  res["sweep"] = {{"rows", rows}, {"slope", num(slope)}, {"intercept", num(intercept)}};
  if (std::isfinite(slope)) slope_check(c, slope, chk);
  return res;
}

// ---------------------------------------------------------------- verify

/// Seeded random Hermitian matrices with the identities and inequalities that hold on every
/// finite-dimensional input.
json run_verify(const ScenarioConfig& c, Checks& chk) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> dims(1, c.verify.max_dim);

  struct Tally {
    int count = 0;
    int violations = 0;
    double worst = 0.0;
    void add(bool ok, double v) {
      ++count;
      violations += ok ? 0 : 1;
      worst = std::max(worst, v);
    }
  };
  Tally herglotz, measure, etup, feshbach, fixed, lemma, regularized;

  for (int trial = 0; trial < c.verify.trials; ++trial) {
    const int d = dims(rng);
    const bool real = trial % 2 == 0;
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j <= i; ++j) {
        const cplx z(N01(rng), (real || i == j) ? 0.0 : N01(rng));
        A(i, j) = z;
        A(j, i) = std::conj(z);
      }
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = cplx(N01(rng), real ? 0.0 : N01(rng));
    const HermitianOperator H(A);
    const State psi = State::normalize(v);
    const FeshbachMap fm(H, psi);
    const SpectralMeasure& mu = fm.measure();
    const double s = H.scale();

    measure.add(std::abs(mu.total_weight() - 1.0) <= 1e-12, std::abs(mu.total_weight() - 1.0));
    for (int k = 0; k < 3; ++k) {
      const cplx z(s * U(rng), s * std::pow(10.0, -2.0 + k));
      const double im = resolvent_expectation(mu, z).imag();
      herglotz.add(im > 0.0, im > 0.0 ? 0.0 : -im);
      const double r = fm.residual(z) / s;
      feshbach.add(r <= 1e-9, r);
    }
    const double lambda = s * U(rng);
    const EtupReport e = etup_chain(H, psi, lambda, c.solver.width_tol);
    etup.add(e.chain_ok, std::max(0.0, e.delta_e - e.residual));
    if (e.delta_e > 0.0) {
      const double fp = fm.fixed_point_residual(lambda, e.delta_e);
      fixed.add(fp <= 10.0 * c.solver.width_tol, fp);
    }
    // Cauchy-Schwarz with the weight e^{-eps t} gives f(eps)^2 / eps <= 2 S_reg(eps / 2) exactly,
    // a horizon-free form of the lower bound valid on any measure.
    const double eps = e.delta_e > 0.0 ? e.delta_e : 0.1 * s;
    const double f = width_function(mu, lambda, eps);
    const double reg_half = sojourn_regularized(mu, 0.5 * eps);
    lemma.add(f * f / eps <= 2.0 * reg_half * (1.0 + 1e-12), std::max(0.0, f * f / eps - 2.0 * reg_half));
    if (mu.size() >= 2) {
      const double horizon = 0.4 * heisenberg_time(mu);
      const double reg = sojourn_regularized(mu, eps);
      const double bound =
          sojourn_truncated(mu, horizon).value + std::exp(-2.0 * eps * horizon) / eps;
      regularized.add(reg <= bound * (1.0 + 1e-12), std::max(0.0, reg - bound));
    }
  }

  json res = json::object();
  auto report = [&](const std::string& name, const Tally& t, double tol) {
    res[name] = {{"count", t.count}, {"violations", t.violations}, {"worst", num(t.worst)}};
    chk.add(name, t.violations == 0, t.worst, "<=", tol);
  };
  report("measure_normalized", measure, 1e-12);
  report("herglotz", herglotz, 0.0);
  report("feshbach_identity", feshbach, 1e-9);
  report("etup_chain", etup, c.solver.width_tol);
  report("fixed_point", fixed, 10.0 * c.solver.width_tol);
  report("lemma_regularized", lemma, 0.0);
  report("regularized_below_truncated_plus_tail", regularized, 0.0);
  res["trials"] = c.verify.trials;
  res["max_dim"] = c.verify.max_dim;
  return res;
}

// ---------------------------------------------------------------- output

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(e));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path + ": " + std::strerror(errno));
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  const double x = from_num(v);
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void emit_tables(const json& report, const std::string& path) {
  std::string text;
  for (std::size_t i = 0; i < std::size(kSweepColumns); ++i)
    text += (i ? "," : "") + std::string(kSweepColumns[i]);
  text += "\n";
  const json* rows = nullptr;
  if (report.contains("results") && report["results"].contains("sweep"))
    rows = &report["results"]["sweep"]["rows"];
  if (rows)
    for (const json& r : *rows) {
      for (std::size_t i = 0; i < std::size(kSweepColumns); ++i)
        text += (i ? "," : "") + csv_cell(r.at(kSweepColumns[i]));
      text += "\n";
    }
  write_file(path, text);
}

RunResult run(const ScenarioConfig& cfg, const std::string& out_dir) {
  Checks chk;
  json results;
  switch (cfg.scenario) {
    case Scenario::Width: results = run_width(cfg, chk); break;
    case Scenario::Sojourn: results = run_sojourn(cfg, chk); break;
    case Scenario::FgrSweep: results = run_fgr_sweep(cfg, chk); break;
    case Scenario::Floquet: results = run_floquet(cfg, chk); break;
    case Scenario::AcStark: results = run_ac_stark(cfg, chk); break;
    case Scenario::Multistate: results = run_multistate(cfg, chk); break;
    case Scenario::Verify: results = run_verify(cfg, chk); break;
  }

  RunResult out;
  out.exit_code = chk.ok ? kOk : kAssertionFailed;
  out.report = {{"provenance",
                 {{"tool", "sojourn-lab"},
                  {"version", SOJOURN_LAB_VERSION},
                  {"schema_version", kSchemaVersion},
                  {"config_hash", fnv1a_hex(cfg.canonical.dump())},
                  {"seed", cfg.seed},
                  {"timestamp", utc_timestamp()}}},
                {"scenario", scenario_name(cfg.scenario)},
                {"config", cfg.canonical},
                {"results", results},
                {"assertions", chk.list},
                {"status", chk.ok ? "pass" : "fail"}};

  std::filesystem::create_directories(out_dir);
  out.report_path = (std::filesystem::path(out_dir) / cfg.report_name).string();
  write_file(out.report_path, out.report.dump(2) + "\n");
  if (results.contains("sweep")) {
    out.table_path = (std::filesystem::path(out_dir) / cfg.table_name).string();
    emit_tables(out.report, out.table_path);
  }
  return out;
}

int execute(const std::string& scenario, const std::optional<std::string>& config_path,
            const std::string& out_dir, std::optional<std::uint64_t> seed, std::ostream& out,
            std::ostream& err) {
  try {
    const Scenario sc = parse_scenario(scenario);
    ScenarioConfig cfg;
    if (config_path)
      cfg = load_config(*config_path, sc);
    else if (sc == Scenario::Verify)
      cfg = parse_config(json{{"schema_version", kSchemaVersion}}, sc);
    else
      throw ConfigError("--config", "is required for scenario " + scenario);
    if (seed) cfg.seed = *seed;
    const RunResult r = run(cfg, out_dir);
    std::size_t passed = 0;
    for (const json& a : r.report["assertions"]) passed += a["ok"].get<bool>() ? 1 : 0;
    out << scenario << ": " << r.report["status"].get<std::string>() << " (" << passed << "/"
        << r.report["assertions"].size() << " assertions) -> " << r.report_path;
    if (!r.table_path.empty()) out << ", " << r.table_path;
    out << "\n";
    for (const json& a : r.report["assertions"])
      if (!a["ok"].get<bool>())
        err << "assertion failed: " << a["name"].get<std::string>() << ": " << a["value"].dump()
            << " " << a["relation"].get<std::string>() << " " << a["bound"].dump() << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const sojourn::InvalidArgument& e) {
    // includes NonResonanceViolation: the configured drive is not admissible
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const sojourn::NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace lab
