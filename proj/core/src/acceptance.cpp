#include "coag/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "coag/complex_special.hpp"
#include "coag/direct_solver.hpp"
#include "coag/fundamental_solution.hpp"
#include "coag/io.hpp"
#include "coag/ivp_flux.hpp"
#include "coag/quadrature.hpp"
#include "coag/symbols.hpp"
#include "coag/wiener_hopf.hpp"

namespace coag {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double rel(Complex a, Complex b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

struct Harness {
  const AcceptanceOptions& opt;
  std::ostream& log;
  AcceptanceReport& rep;

  void run(int id, const std::string& name,
           const std::function<std::pair<bool, std::string>()>& body) {
    if (!opt.only.empty() &&
        std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end())
      return;
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto t0 = Clock::now();
    try {
      auto [pass, detail] = body();
      r.pass = pass;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    log << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": "
        << r.name << " -- " << r.detail << " (" << fmt(r.seconds) << " s)\n";
    log.flush();
    rep.results.push_back(std::move(r));
  }
};

}  // namespace

bool AcceptanceReport::all_pass() const {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& opt, std::ostream& log) {
  AcceptanceReport rep;
  rep.lambda = opt.lambda;
  rep.tol = opt.tol;
  Harness h{opt, log, rep};

  const KernelParams p(opt.lambda);
  const double lam = opt.lambda;
  const double d = p.shift();

  // Shared heavyweight objects, built lazily.
  std::optional<WienerHopfFactor> factor;
  std::optional<FundamentalSolution> fs;
  auto need_factor = [&]() -> WienerHopfFactor& {
    if (!factor)
      factor.emplace(KernelParams(lam), std::nullopt, std::min(1e-11, 0.01 * opt.tol));
    return *factor;
  };
  auto need_fs = [&]() -> FundamentalSolution& {
    if (!fs) fs.emplace(need_factor());
    return *fs;
  };

  // ---------------------------------------------------------------- 1
  h.run(1, "Mellin symbol against the defining integral", [&] {
    double worst = 0.0;
    for (Complex s : {Complex{1.5, 0.0}, Complex{2.0, 0.0}, Complex{3.0, 0.0},
                      Complex{5.0, 0.0}, Complex{10.0, 0.0}, Complex{2.0, 3.0}})
      worst = std::max(worst, rel(eval_M(s), eval_M_integral_oracle(s, 1e-12)));
    double zworst = 0.0;
    for (int n = 0; n <= 5; ++n)
      zworst = std::max(zworst, std::abs(eval_M(Complex{0.5 - n, 0.0})));
    const bool pass = worst < 1e-10 && zworst < 1e-10;
    return std::make_pair(pass, "closed form vs integral rel err " + fmt(worst) +
                                    "; |M| at zeros " + fmt(zworst));
  });

  // ---------------------------------------------------------------- 2
  h.run(2, "symbol asymptotics", [&] {
    double worst = 0.0;
    for (double sgn : {1.0, -1.0}) {
      const Complex xi{sgn * 400.0, 1.8};
      worst = std::max(worst, rel(eval_Phi_asymptotic(xi, p, 1), eval_Phi(xi, p)));
    }
    std::vector<double> ls, lr;
    for (double s : {1e2, 1e3, 1e4}) {
      ls.push_back(std::log(s));
      lr.push_back(std::log(rel(eval_M_asymptotic({s, 0.0}), eval_M({s, 0.0}))));
    }
    const double slope = (lr[2] - lr[0]) / (ls[2] - ls[0]);
    const bool pass = worst < 1e-3 && std::abs(slope + 2.0) < 0.2;
    return std::make_pair(pass, "order-1 rel err " + fmt(worst) +
                                    " at |Re|=400; residual slope " + fmt(slope));
  });

  // ---------------------------------------------------------------- 3
  h.run(3, "Wiener-Hopf factorization", [&] {
    auto& f = need_factor();
    double eqworst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Complex xi{-8.0 + 0.85 * i, f.beta1() - (0.15 + 0.03 * i) * d};
      const Complex lhs = f.eval_V(xi);
      const Complex rhs =
          -f.eval_V(xi + Complex{0.0, d}) * eval_Phi(xi + Complex{0.0, d}, p);
      eqworst = std::max(eqworst, std::abs(lhs - rhs) / std::abs(lhs));
    }
    // catalog: certify the four printed family heads after merging the
    // ladder collisions (at lambda = 3/2 whole zero families annihilate
    // against pole candidates; the merged catalog is what V actually has)
    int annihilated = 0, certified = 0;
    bool cat_ok = true;
    std::vector<double> fam;
    for (int n = 1; n <= 6; ++n) fam.push_back(1.0 + 0.5 * lam + n);       // zeros
    for (int k = 1; k <= 6; ++k) fam.push_back(0.5 * (1.0 + lam) - k * d);  // zeros
    for (int n = 1; n <= 6; ++n) fam.push_back(0.5 * (1.0 + lam) + n);     // poles
    for (int k = 1; k <= 6; ++k) fam.push_back(1.0 + 0.5 * lam - k * d);   // poles
    for (double im : fam) {
      const int ord = f.order_at(Complex{0.0, im});
      if (ord == 0) {
        ++annihilated;
        continue;
      }
      const VValue v = f.extend_V(Complex{0.0, im} + Complex{1e-10, 0.0});
      const double mag = std::abs(std::exp((ord > 0 ? 1.0 : -1.0) * v.log_reg)) *
                         1e-10;
      if (!(mag < 1e-8)) cat_ok = false;
      ++certified;
    }
    const double rate = kPi / (2.0 * (lam - 1.0));
    const double slope =
        (f.log_V({400.0, f.beta1() - 0.5 * d}).real() -
         f.log_V({100.0, f.beta1() - 0.5 * d}).real()) /
        300.0;
    const bool slope_ok = std::abs(slope + rate) < 0.05;
    const bool pass = eqworst < 1e-8 && cat_ok && slope_ok;
    return std::make_pair(
        pass, "difference-equation residual " + fmt(eqworst) + "; " +
                  std::to_string(certified) + " singularities certified, " +
                  std::to_string(annihilated) +
                  " family entries annihilated by ladder collisions; log|V| slope " +
                  fmt(slope) + " vs " + fmt(-rate));
  });

  // ---------------------------------------------------------------- 4
  h.run(4, "Fourier-side fundamental solution", [&] {
    auto& F = need_fs();
    const double init = std::abs(
        F.eval_Ghat(1e-4, Complex{0.0, 1.6}, 1e-9).value - 1.0 / kSqrtTwoPi);
    double ode = 0.0;
    for (Complex xi : {Complex{2.0, 1.7}, Complex{0.0, 1.6}, Complex{-3.0, 1.85}}) {
      const double t = 0.5, hstep = 5e-4 * t;
      const Complex dG = (F.eval_Ghat(t + hstep, xi, 1e-10).value -
                          F.eval_Ghat(t - hstep, xi, 1e-10).value) /
                         (2.0 * hstep);
      const Complex rhs =
          F.eval_Ghat(t, xi + Complex{0.0, d}, 1e-10).value *
          eval_Phi(xi + Complex{0.0, d}, p);
      ode = std::max(ode, std::abs(dG - rhs) / std::abs(rhs));
    }
    std::vector<double> roots, logs;
    for (double re : {100.0, 400.0, 900.0, 1600.0, 2500.0}) {
      roots.push_back(std::sqrt(re));
      logs.push_back(
          std::log(std::abs(F.eval_Ghat(0.5, Complex{re, 1.8}, 1e-10).value)));
    }
    const double s1 = (logs[2] - logs[0]) / (roots[2] - roots[0]);
    const double s2 = (logs[4] - logs[2]) / (roots[4] - roots[2]);
    const bool decay_ok = s1 < 0.0 && s2 < 0.0 && std::abs(s1 - s2) < 0.2 * std::abs(s1);
    const bool pass = init < 0.01 && ode < 1e-3 && decay_ok;
    return std::make_pair(pass, "|Ghat(1e-4,1.6i) - (2pi)^-1/2| = " + fmt(init) +
                                    "; ODE residual " + fmt(ode) +
                                    "; sqrt-decay slopes " + fmt(s1) + ", " + fmt(s2));
  });

  // ---------------------------------------------------------------- 5
  h.run(5, "small-time profile", [&] {
    auto& F = need_fs();
    auto sup_diff = [&](double t) {
      double sup = 0.0, supref = 0.0;
      for (double chi = 0.2; chi <= 5.0; chi += 0.2) {
        const double g = F.eval_G(t, t * t * chi, 1e-8).value * t * t;
        const double ref = FundamentalSolution::small_time_profile(chi);
        sup = std::max(sup, std::abs(g - ref));
        supref = std::max(supref, ref);
      }
      return sup / supref;
    };
    const double r1 = sup_diff(0.05);
    const double r2 = opt.quick ? 0.0 : sup_diff(0.025);
    const double neg = std::max(
        std::abs(FundamentalSolution::small_time_profile(-1.0)),
        std::abs(FundamentalSolution::small_time_profile(-4.0)));
    const bool pass = r1 <= 0.05 && (opt.quick || r2 < r1) && neg <= 1e-6;
    return std::make_pair(pass, "sup rel diff " + fmt(r1) + " at t=0.05" +
                                    (opt.quick ? "" : ", " + fmt(r2) + " at t=0.025") +
                                    "; |profile(chi<0)| " + fmt(neg));
  });

  // ---------------------------------------------------------------- 6
  h.run(6, "large-time self-similarity", [&] {
    auto& F = need_fs();
    const double C1 = F.psi1_tail_constant_left();
    const double C2 = F.psi1_tail_constant_right();
    double lflat = 0.0, rflat = 0.0;
    for (double th : {-10.0, -8.0, -6.0})
      lflat = std::max(lflat, std::abs(F.large_time_profile(th, 1e-10) *
                                           std::exp(1.5 * th) / C1 - 1.0));
    for (double th : {6.0, 8.0, 10.0})
      rflat = std::max(rflat, std::abs(F.large_time_profile(th, 1e-10) *
                                           std::exp(0.5 * (3.0 + lam) * th) / C2 - 1.0));
    // sigma-regime slopes of the rescaled solution
    auto slope_at = [&](double slo, double shi, double t) {
      const double f1 = std::pow(t, -2.0 / (lam - 1.0));
      const double x1 = slo * std::pow(t, -2.0 / (lam - 1.0));
      const double x2 = shi * std::pow(t, -2.0 / (lam - 1.0));
      const double g1 = f1 * F.eval_G(t, std::log(x1), 1e-9).value;
      const double g2 = f1 * F.eval_G(t, std::log(x2), 1e-9).value;
      return std::log(std::abs(g2 / g1)) / std::log(shi / slo);
    };
    const double sl = slope_at(0.02, 0.3, 20.0);
    const double sr = slope_at(3.0, 60.0, 20.0);
    const bool pass = lflat <= 0.02 && rflat <= 0.02 &&
                      std::abs(sl + 1.5) <= 0.05 &&
                      std::abs(sr + 0.5 * (3.0 + lam)) <= 0.05;
    return std::make_pair(pass, "plateau deviations " + fmt(lflat) + " / " + fmt(rflat) +
                                    "; sigma slopes " + fmt(sl) + " / " + fmt(sr));
  });

  // ---------------------------------------------------------------- 7
  h.run(7, "finite-time tails", [&] {
    auto& F = need_fs();
    const double t = 0.3;
    auto [left, right] = F.finite_time_tails(t, 1e-8);
    const double pred = F.predicted_right_tail_coefficient();
    const double ldev = std::abs(left / t - 1.0);
    const double rdev = std::abs(right / (pred * t) - 1.0);
    const bool pass = ldev <= 0.05 && rdev <= 0.05;
    return std::make_pair(pass, "left coeff/t = 1 " + fmt(ldev) +
                                    " off; right coeff/(C t) " + fmt(rdev) + " off");
  });

  // ---------------------------------------------------------------- 8
  h.run(8, "direct-solver equivalence", [&] {
    auto& F = need_fs();
    auto tpl = GridFunction::log_grid(1e-3, 1e3, opt.quick ? 512 : 1024);
    auto g0 = mollified_delta(tpl, 1.0, 4.0);
    SolverConfig cfg;
    cfg.t_end = 0.5;
    auto tr = evolve(g0, cfg, p);
    const auto& gd = tr.states.back();
    double l1 = 0.0, l1ref = 0.0;
    for (std::size_t i = 0; i < gd.size(); i += 2) {
      const double x = gd.x[i];
      if (x < 0.05 || x > 20.0) continue;
      const double ga = F.rescale_fundamental(0.5, x, 1.0);
      l1 += std::abs(gd.values[i] - ga) * x;
      l1ref += std::abs(ga) * x;
    }
    const double rl1 = l1 / l1ref;
    return std::make_pair(rl1 < 0.05, "relative L1 distance " + fmt(rl1));
  });

  // ---------------------------------------------------------------- 9
  h.run(9, "stationarity and power-law eigenrelation", [&] {
    auto tpl = GridFunction::log_grid(1e-3, 1e3, 2048);
    GridFunction g = tpl;
    for (std::size_t i = 0; i < g.size(); ++i)
      g.values[i] = std::pow(g.x[i], -0.5 * (3.0 + lam));
    auto L = apply_L(g, p);
    double stat = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.x[i];
      if (x < 0.05 || x > 50.0) continue;
      const double scale =
          2.0 * std::sqrt(2.0) * std::pow(x, 0.5 * (lam - 1.0)) * g.values[i];
      stat = std::max(stat, std::abs(L.values[i]) / scale);
    }
    // eigenrelation at a = 1.6: the tail integral of the operator diverges
    // for this exponent (y^{lambda/2} g ~ y^{-0.85} at infinity), so the
    // truncated-operator value depends on the cutoff and cannot match the
    // analytically continued symbol; reported honestly.
    GridFunction h16 = tpl;
    for (std::size_t i = 0; i < h16.size(); ++i)
      h16.values[i] = std::pow(h16.x[i], -1.6);
    auto L16 = apply_L(h16, p);
    const double m16 = eval_M(Complex{0.5 * (lam + 2.0) - 1.6, 0.0}).real();
    const std::size_t j = static_cast<std::size_t>(
        std::lround(std::log(1.0 / tpl.x_min) / tpl.dX));
    const double dev16 =
        std::abs(L16.values[j] / std::pow(tpl.x[j], -1.6 + 0.5 * (lam - 1.0)) /
                     m16 - 1.0);
    const bool pass = stat < 0.02 && dev16 <= 0.02;
    return std::make_pair(
        pass, "stationarity residual " + fmt(stat) + "; eigenrelation at a=1.6 off by " +
                  fmt(dev16) +
                  (dev16 > 0.02 ? " (tail integral diverges for a=1.6: y^{l/2} g "
                                  "is not integrable, so no truncation can match "
                                  "the continued symbol; see a=2 unit test for the "
                                  "convergent case)"
                                : ""));
  });

  // ---------------------------------------------------------------- 10
  h.run(10, "particle fluxes and mass balance", [&] {
    auto plaw = [&](double x) { return std::pow(x, -0.5 * (3.0 + lam)); };
    double jdev = 0.0;
    for (double R : {0.5, 1.0, 2.0, 10.0})
      jdev = std::max(jdev, std::abs(flux_J_minus(plaw, R, p, 1e-6).J_minus /
                                         (2.0 * kPi) - 1.0));
    // compactly-perturbed state: evolved mollified delta (which develops the
    // stationary tail) on a wide grid
    auto tpl = GridFunction::log_grid(1e-3, 1e4, opt.quick ? 1024 : 2048);
    auto g0 = mollified_delta(tpl, 1.0, 4.0);
    SolverConfig cfg;
    cfg.t_end = 0.25;
    cfg.checkpoints = {0.05, 0.1, 0.15, 0.2, 0.25};
    auto tr = evolve(g0, cfg, p);
    auto repf = flux_linearized(tr.states.back(), 100.0, p, 1e-6);
    const double i1r = std::abs(repf.I1) / std::abs(repf.I2);
    const double i3r = std::abs(repf.I3) / std::abs(repf.I2);
    const double bal = mass_balance(tr, 20.0, p, 1e-5);
    const bool pass = jdev <= 0.01 && i1r < 0.01 && i3r < 0.01 && bal < 0.02;
    std::string note;
    if (i1r >= 0.01 || i3r >= 0.01)
      note = " (the linearization of the quadratic flux necessarily carries "
             "I1 -> (4pi-8)a and I3 -> 4a for a developed stationary tail; "
             "they cannot vanish relative to I2 -> 4a)";
    return std::make_pair(pass, "power-law flux dev " + fmt(jdev) +
                                    "; I1/I2 " + fmt(i1r) + ", I3/I2 " + fmt(i3r) +
                                    "; balance residual " + fmt(bal) + note);
  });

  // ---------------------------------------------------------------- 11
  h.run(11, "determinism of the verification outputs", [&] {
    AcceptanceOptions sub;
    sub.lambda = opt.lambda;
    sub.tol = opt.tol;
    sub.quick = true;
    sub.only = {1, 2, 3};
    std::ostringstream sink1, sink2;
    const auto r1 = run_acceptance(sub, sink1);
    const auto r2 = run_acceptance(sub, sink2);
    const std::string j1 = acceptance_report_json(r1);
    const std::string j2 = acceptance_report_json(r2);
    return std::make_pair(j1 == j2, j1 == j2 ? "byte-identical reports"
                                             : "reports differ");
  });

  return rep;
}

std::string acceptance_report_json(const AcceptanceReport& rep) {
  nlohmann::json j;
  j["schema"] = "coagfs-verify-1";
  j["version"] = version_string();
  j["lambda"] = format_double(rep.lambda);
  j["tol"] = format_double(rep.tol);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rep.results) {
    nlohmann::json e;
    e["id"] = r.id;
    e["name"] = r.name;
    e["pass"] = r.pass;
    e["detail"] = r.detail;  // numbers only, no timings
    arr.push_back(e);
  }
  j["criteria"] = arr;
  j["all_pass"] = rep.all_pass();
  return j.dump(2);
}

}  // namespace coag
