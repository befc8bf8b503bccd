// coagfs: fundamental-solution toolkit for the homogeneous linearized
// coagulation equation with kernel (xy)^(lambda/2), lambda in (1,2).
//
// Subcommands expose the Mellin/Wiener-Hopf evaluators, the real-space
// fundamental solution, a direct log-grid solver used as an independent
// check, particle-flux functionals, and the full verification suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "coag/acceptance.hpp"
#include "coag/complex_special.hpp"
#include "coag/direct_solver.hpp"
#include "coag/fundamental_solution.hpp"
#include "coag/io.hpp"
#include "coag/ivp_flux.hpp"
#include "coag/quadrature.hpp"
#include "coag/symbols.hpp"
#include "coag/wiener_hopf.hpp"

namespace {

using coag::Complex;

struct CommonOpts {
  double lambda = 1.5;
  double tol = 1e-8;
  std::string out;
  std::string cache;
  std::string config;
  double grid_min = 1e-3, grid_max = 1e3;
  int grid_nodes = 1024;
  double t = 0.5;
  double R = 1.0;
};

void apply_config_file(CommonOpts& o) {
  if (o.config.empty()) return;
  auto kv = coag::parse_config_file(o.config);
  auto get = [&](const char* k, auto& slot) {
    auto it = kv.find(k);
    if (it == kv.end()) return;
    std::istringstream is(it->second);
    is >> slot;
  };
  get("lambda", o.lambda);
  get("tol", o.tol);
  get("grid_min", o.grid_min);
  get("grid_max", o.grid_max);
  get("grid_nodes", o.grid_nodes);
  get("t", o.t);
  get("R", o.R);
  if (kv.count("out") && o.out.empty()) o.out = kv["out"];
  if (kv.count("cache") && o.cache.empty()) o.cache = kv["cache"];
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--lambda", o.lambda, "homogeneity exponent, in (1,2)");
  cmd->add_option("--tol", o.tol, "numerical tolerance")
      ->check(CLI::Range(1e-14, 1e-2));
  cmd->add_option("--out", o.out, "output file");
  cmd->add_option("--cache", o.cache, "factor cache file (loaded when present, saved after)");
  cmd->add_option("--config", o.config, "key=value or JSON config file (flags win)");
  cmd->add_option("--grid-min", o.grid_min, "grid lower edge");
  cmd->add_option("--grid-max", o.grid_max, "grid upper edge");
  cmd->add_option("--grid-nodes", o.grid_nodes, "grid node count");
  cmd->add_option("--t", o.t, "time");
  cmd->add_option("--R", o.R, "flux radius");
}

coag::WienerHopfFactor make_factor(const CommonOpts& o) {
  if (!o.cache.empty() && std::ifstream(o.cache).good()) {
    auto f = coag::WienerHopfFactor::load_cache(o.cache);
    if (std::abs(f.params().lambda - o.lambda) < 1e-12) return f;
    std::cerr << "cache lambda mismatch, rebuilding factor\n";
  }
  return coag::WienerHopfFactor(coag::KernelParams(o.lambda), std::nullopt,
                                std::min(1e-11, 0.01 * o.tol));
}

void maybe_save_cache(const coag::WienerHopfFactor& f, const CommonOpts& o) {
  if (!o.cache.empty()) f.save_cache(o.cache);
}

std::map<std::string, std::string> base_manifest(const CommonOpts& o) {
  return {{"lambda", coag::format_double(o.lambda)},
          {"tol", coag::format_double(o.tol)}};
}

int cmd_symbol(const CommonOpts& o, double re_lo, double re_hi, int n,
               double im) {
  coag::KernelParams p(o.lambda);
  std::ofstream out(o.out.empty() ? "symbol.csv" : o.out);
  out << coag::csv_manifest(base_manifest(o));
  out << "re_xi,im_xi,phi_re,phi_im,m_re,m_im\n";
  for (int i = 0; i < n; ++i) {
    const double re = re_lo + (re_hi - re_lo) * i / std::max(1, n - 1);
    const Complex xi{re, im};
    const Complex phi = coag::eval_Phi(xi, p);
    const Complex m = coag::eval_M(coag::kImag * xi + (1.0 + 0.5 * p.lambda));
    out << coag::format_double(re) << ',' << coag::format_double(im) << ','
        << coag::format_double(phi.real()) << ','
        << coag::format_double(phi.imag()) << ','
        << coag::format_double(m.real()) << ','
        << coag::format_double(m.imag()) << "\n";
  }
  return 0;
}

int cmd_factor(const CommonOpts& o, int catalog_count) {
  auto f = make_factor(o);
  coag::KernelParams p(o.lambda);
  nlohmann::json j;
  j["schema"] = "coagfs-factor-1";
  j["version"] = coag::version_string();
  j["lambda"] = o.lambda;
  j["beta1"] = f.beta1();
  auto cat = f.catalog_V_singularities(catalog_count);
  nlohmann::json zeros = nlohmann::json::array(),
                 poles = nlohmann::json::array();
  for (const auto& s : cat.entries) {
    (s.kind == coag::Singularity::Kind::Zero ? zeros : poles)
        .push_back(s.location.imag());
  }
  j["zeros_im"] = zeros;
  j["poles_im"] = poles;
  // difference-equation residual on a strip sample
  double worst = 0.0;
  const double d = p.shift();
  for (int i = 0; i < 10; ++i) {
    const Complex xi{-4.0 + i, f.beta1() - 0.6 * d};
    const Complex lhs = f.eval_V(xi);
    const Complex rhs = -f.eval_V(xi + Complex{0.0, d}) *
                        coag::eval_Phi(xi + Complex{0.0, d}, p);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  j["difference_equation_residual"] = worst;
  maybe_save_cache(f, o);
  std::ofstream out(o.out.empty() ? "factor.json" : o.out);
  out << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return worst < 1e-7 ? 0 : 3;
}

int cmd_ghat(const CommonOpts& o, double re, double im) {
  auto f = make_factor(o);
  coag::FundamentalSolution fs(f);
  auto e = fs.eval_Ghat(o.t, Complex{re, im}, o.tol);
  nlohmann::json j;
  j["schema"] = "coagfs-ghat-1";
  j["lambda"] = o.lambda;
  j["t"] = o.t;
  j["xi"] = {re, im};
  j["value"] = {e.value.real(), e.value.imag()};
  j["error_estimate"] = e.error_estimate;
  maybe_save_cache(f, o);
  std::cout << j.dump(2) << "\n";
  if (!o.out.empty()) std::ofstream(o.out) << j.dump(2) << "\n";
  return 0;
}

int cmd_g(const CommonOpts& o, double x_lo, double x_hi, int n) {
  auto f = make_factor(o);
  coag::FundamentalSolution fs(f);
  std::vector<double> xs(n), Xs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = x_lo * std::pow(x_hi / x_lo, i / std::max(1.0, n - 1.0));
    Xs[i] = std::log(xs[i]);
  }
  auto gs = fs.eval_G_many(o.t, Xs, o.tol);
  std::ofstream out(o.out.empty() ? "g.csv" : o.out);
  auto m = base_manifest(o);
  m["t"] = coag::format_double(o.t);
  out << coag::csv_manifest(m);
  out << "x,g,realness_defect\n";
  for (int i = 0; i < n; ++i)
    out << coag::format_double(xs[i]) << ','
        << coag::format_double(gs[i].value) << ','
        << coag::format_double(gs[i].realness_defect) << "\n";
  maybe_save_cache(f, o);
  return 0;
}

int cmd_profile(const CommonOpts& o, const std::string& which) {
  coag::ProfileTable t;
  t.lambda = o.lambda;
  t.tol = o.tol;
  if (which == "small-time") {
    auto f = make_factor(o);
    coag::FundamentalSolution fs(f);
    t.regime = coag::ProfileTable::Regime::SmallTime;
    t.t = o.t;
    for (double chi = 0.2; chi <= 5.0; chi += 0.2) {
      t.abscissae.push_back(chi);
      t.values.push_back(fs.eval_G(o.t, o.t * o.t * chi, o.tol).value * o.t *
                         o.t);
      t.reference.push_back(coag::FundamentalSolution::small_time_profile(chi));
    }
    maybe_save_cache(f, o);
  } else if (which == "large-time") {
    auto f = make_factor(o);
    coag::FundamentalSolution fs(f);
    t.regime = coag::ProfileTable::Regime::LargeTime;
    for (double th = -12.0; th <= 12.0; th += 0.5) {
      t.abscissae.push_back(th);
      t.values.push_back(fs.large_time_profile(th, o.tol));
    }
    maybe_save_cache(f, o);
  } else if (which == "tails") {
    auto f = make_factor(o);
    coag::FundamentalSolution fs(f);
    t.regime = coag::ProfileTable::Regime::FiniteTimeTail;
    t.t = o.t;
    for (double X = -8.0; X <= 8.0; X += 0.5) {
      t.abscissae.push_back(X);
      t.values.push_back(fs.eval_G(o.t, X, o.tol).value);
    }
    maybe_save_cache(f, o);
  } else {
    std::cerr << "unknown profile kind: " << which << "\n";
    return 2;
  }
  coag::write_profile_csv(o.out.empty() ? ("profile_" + which + ".csv") : o.out,
                          t);
  return 0;
}

int cmd_direct(const CommonOpts& o, double x0, double width) {
  coag::KernelParams p(o.lambda);
  auto tpl = coag::GridFunction::log_grid(o.grid_min, o.grid_max, o.grid_nodes);
  auto g0 = coag::mollified_delta(tpl, x0, width);
  coag::SolverConfig cfg;
  cfg.t_end = o.t;
  for (int k = 1; k <= 5; ++k) cfg.checkpoints.push_back(o.t * k / 5.0);
  auto tr = coag::evolve(g0, cfg, p);
  std::vector<coag::TrajectoryRow> rows;
  for (std::size_t s = 0; s < tr.states.size(); ++s)
    for (std::size_t i = 0; i < tr.states[s].size(); i += 4)
      rows.push_back({tr.times[s], tr.states[s].x[i], tr.states[s].values[i]});
  auto m = base_manifest(o);
  m["t_end"] = coag::format_double(o.t);
  m["dt"] = coag::format_double(tr.dt_used);
  m["operator_norm"] = coag::format_double(tr.operator_norm_estimate);
  coag::write_trajectory_csv(o.out.empty() ? "direct.csv" : o.out, rows, m);
  nlohmann::json j;
  j["schema"] = "coagfs-direct-1";
  j["dt"] = tr.dt_used;
  j["steps"] = tr.steps;
  j["masses"] = tr.masses;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_compare(const CommonOpts& o, double x0, double width) {
  coag::KernelParams p(o.lambda);
  auto f = make_factor(o);
  coag::FundamentalSolution fs(f);
  auto tpl = coag::GridFunction::log_grid(o.grid_min, o.grid_max, o.grid_nodes);
  auto g0 = coag::mollified_delta(tpl, x0, width);
  coag::SolverConfig cfg;
  cfg.t_end = o.t;
  auto tr = coag::evolve(g0, cfg, p);
  const auto& gd = tr.states.back();

  double l1 = 0.0, l1ref = 0.0;
  std::ofstream out(o.out.empty() ? "compare.csv" : o.out);
  auto m = base_manifest(o);
  m["t"] = coag::format_double(o.t);
  out << coag::csv_manifest(m);
  out << "x,g_direct,g_analytic,abs_diff\n";
  for (std::size_t i = 0; i < gd.size(); ++i) {
    const double x = gd.x[i];
    if (x < 0.05 || x > 20.0) continue;
    const double ga = fs.rescale_fundamental(o.t, x, x0) / 1.0;
    const double gdv = gd.values[i];
    out << coag::format_double(x) << ',' << coag::format_double(gdv) << ','
        << coag::format_double(ga) << ','
        << coag::format_double(std::abs(gdv - ga)) << "\n";
    l1 += std::abs(gdv - ga) * x * tpl.dX;
    l1ref += std::abs(ga) * x * tpl.dX;
  }
  maybe_save_cache(f, o);
  nlohmann::json j;
  j["schema"] = "coagfs-compare-1";
  j["relative_l1"] = l1 / l1ref;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_flux(const CommonOpts& o, double amplitude) {
  coag::KernelParams p(o.lambda);
  const double expo = -0.5 * (3.0 + o.lambda);
  auto f = [amplitude, expo](double x) { return amplitude * std::pow(x, expo); };
  auto rep = coag::flux_J_minus(f, o.R, p, o.tol);
  nlohmann::json j;
  j["schema"] = "coagfs-flux-1";
  j["lambda"] = o.lambda;
  j["R"] = o.R;
  j["amplitude"] = amplitude;
  j["J_minus"] = rep.J_minus;
  j["two_pi_A2"] = 2.0 * coag::kPi * amplitude * amplitude;
  std::cout << j.dump(2) << "\n";
  if (!o.out.empty()) std::ofstream(o.out) << j.dump(2) << "\n";
  return 0;
}

int cmd_ivp(const CommonOpts& o, double x_lo, double x_hi, int n) {
  auto f = make_factor(o);
  coag::FundamentalSolution fs(f);
  coag::InitialDatum h0;
  h0.sampler = [](double y) {
    const double u = std::log(y);
    return std::exp(-2.0 * u * u);
  };
  h0.decay_exp_zero = 0.0;
  h0.decay_exp_inf = 4.0;
  h0.support_lo = 0.02;
  h0.support_hi = 50.0;
  std::ofstream out(o.out.empty() ? "ivp.csv" : o.out);
  auto m = base_manifest(o);
  m["t"] = coag::format_double(o.t);
  out << coag::csv_manifest(m);
  out << "x,h\n";
  for (int i = 0; i < n; ++i) {
    const double x = x_lo * std::pow(x_hi / x_lo, i / std::max(1.0, n - 1.0));
    out << coag::format_double(x) << ','
        << coag::format_double(coag::solve_ivp(h0, o.t, x, fs, o.tol)) << "\n";
  }
  maybe_save_cache(f, o);
  return 0;
}

int cmd_verify(const CommonOpts& o, bool quick, const std::vector<int>& only) {
  coag::AcceptanceOptions opt;
  opt.lambda = o.lambda;
  opt.tol = o.tol;
  opt.quick = quick;
  opt.only = only;
  auto rep = coag::run_acceptance(opt, std::cout);
  const std::string js = coag::acceptance_report_json(rep);
  std::ofstream(o.out.empty() ? "verify.json" : o.out) << js;
  return rep.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fundamental solution of the homogeneous linearized coagulation equation"};
  app.require_subcommand(1);

  CommonOpts o;
  double re_lo = -40.0, re_hi = 40.0, im = 0.0, re = 0.0, im_xi = 1.8;
  int n = 201, catalog_count = 6;
  double x_lo = 0.05, x_hi = 20.0, x0 = 1.0, width = 4.0, amplitude = 1.0;
  bool quick = false;
  std::vector<int> only;
  std::string profile_kind = "small-time";

  auto* c_symbol = app.add_subcommand("symbol", "tabulate the Mellin and shifted symbols");
  add_common(c_symbol, o);
  c_symbol->add_option("--re-min", re_lo);
  c_symbol->add_option("--re-max", re_hi);
  c_symbol->add_option("--im", im);
  c_symbol->add_option("--n", n);

  auto* c_factor = app.add_subcommand("factor", "build and inspect the Wiener-Hopf factor");
  add_common(c_factor, o);
  c_factor->add_option("--catalog", catalog_count);

  auto* c_ghat = app.add_subcommand("ghat", "evaluate the Fourier-side solution at one point");
  add_common(c_ghat, o);
  c_ghat->add_option("--re", re);
  c_ghat->add_option("--im", im_xi);

  auto* c_g = app.add_subcommand("g", "evaluate the fundamental solution on a grid");
  add_common(c_g, o);
  c_g->add_option("--x-min", x_lo);
  c_g->add_option("--x-max", x_hi);
  c_g->add_option("--n", n);

  auto* c_profile = app.add_subcommand("profile", "asymptotic profiles (small-time | large-time | tails)");
  add_common(c_profile, o);
  c_profile->add_option("kind", profile_kind, "small-time | large-time | tails");

  auto* c_direct = app.add_subcommand("direct", "run the log-grid direct solver");
  add_common(c_direct, o);
  c_direct->add_option("--x0", x0);
  c_direct->add_option("--width", width);

  auto* c_compare = app.add_subcommand("compare", "direct solver against the analytic evaluator");
  add_common(c_compare, o);
  c_compare->add_option("--x0", x0);
  c_compare->add_option("--width", width);

  auto* c_flux = app.add_subcommand("flux", "particle flux of a power-law state");
  add_common(c_flux, o);
  c_flux->add_option("--power-law", amplitude, "amplitude A of A x^{-(3+lambda)/2}");

  auto* c_ivp = app.add_subcommand("ivp", "superposition solution of the initial-value problem");
  add_common(c_ivp, o);
  c_ivp->add_option("--x-min", x_lo);
  c_ivp->add_option("--x-max", x_hi);
  c_ivp->add_option("--n", n);

  auto* c_verify = app.add_subcommand("verify", "run the verification suite");
  add_common(c_verify, o);
  c_verify->add_flag("--quick", quick, "fast smoke subset");
  c_verify->add_option("--only", only, "criteria ids to run");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_config_file(o);
    if (!(o.lambda > 1.0 && o.lambda < 2.0)) {
      std::cerr << "lambda must lie in (1,2)\n";
      return 2;
    }
    if (c_symbol->parsed()) return cmd_symbol(o, re_lo, re_hi, n, im);
    if (c_factor->parsed()) return cmd_factor(o, catalog_count);
    if (c_ghat->parsed()) return cmd_ghat(o, re, im_xi);
    if (c_g->parsed()) return cmd_g(o, x_lo, x_hi, n);
    if (c_profile->parsed()) return cmd_profile(o, profile_kind);
    if (c_direct->parsed()) return cmd_direct(o, x0, width);
    if (c_compare->parsed()) return cmd_compare(o, x0, width);
    if (c_flux->parsed()) return cmd_flux(o, amplitude);
    if (c_ivp->parsed()) return cmd_ivp(o, x_lo, x_hi, n);
    if (c_verify->parsed()) return cmd_verify(o, quick, only);
  } catch (const coag::NumericsError& e) {
    nlohmann::json j;
    j["error"] = e.what();
    std::cerr << j.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
