#include <cmath>

#include "coag/direct_solver.hpp"
#include "coag/fundamental_solution.hpp"
#include "coag/ivp_flux.hpp"
#include "coag/wiener_hopf.hpp"
#include "doctest.h"

using coag::FluxReport;
using coag::GridFunction;
using coag::InitialDatum;
using coag::KernelParams;
using coag::kPi;

namespace {

const coag::FundamentalSolution& fs15() {
  static coag::WienerHopfFactor f{KernelParams(1.5)};
  static coag::FundamentalSolution fs{f};
  return fs;
}

double power_law(double x) { return std::pow(x, -2.25); }  // lambda = 1.5

}  // namespace

TEST_CASE("outward flux of the stationary power law is 2 pi, R-independent") {
  const KernelParams p(1.5);
  for (double R : {0.5, 1.0, 2.0, 10.0}) {
    auto rep = coag::flux_J_minus(power_law, R, p, 1e-6);
    CHECK(std::abs(rep.J_minus / (2.0 * kPi) - 1.0) < 0.01);
  }
}

TEST_CASE("flux is quadratic in the amplitude and vanishes on zero data") {
  const KernelParams p(1.5);
  auto f2 = [](double x) { return 2.0 * std::pow(x, -2.25); };
  const double j1 = coag::flux_J_minus(power_law, 1.0, p, 1e-6).J_minus;
  const double j2 = coag::flux_J_minus(f2, 1.0, p, 1e-6).J_minus;
  CHECK(j2 == doctest::Approx(4.0 * j1).epsilon(1e-6));
  const double j0 =
      coag::flux_J_minus([](double) { return 0.0; }, 1.0, p, 1e-8).J_minus;
  CHECK(j0 == 0.0);
}

TEST_CASE("inward flux from the printed reduction coincides with the outward one") {
  const KernelParams p(1.5);
  const double jm = coag::flux_J_minus(power_law, 2.0, p, 1e-6).J_minus;
  const double jp = coag::flux_J_plus(power_law, 2.0, p, 1e-6).J_plus;
  CHECK(jp == doctest::Approx(jm).epsilon(1e-9));
}

TEST_CASE("flux positivity for nonnegative data") {
  const KernelParams p(1.5);
  auto bump = [](double x) {
    const double u = std::log(x);
    return std::exp(-2.0 * u * u);
  };
  CHECK(coag::flux_J_minus(bump, 1.5, p, 1e-6).J_minus >= 0.0);
  CHECK(coag::flux_J_minus(bump, 0.3, p, 1e-6).J_minus >= 0.0);
}

TEST_CASE("linearized flux of a power-law tail: the derivative of 2 pi A^2") {
  const KernelParams p(1.5);
  // Perturbation with the stationary tail, cut off below x = 0.1: the
  // linearization of the quadratic flux around the unit background gives
  // I1 -> (4 pi - 8) a, I2 -> 4 a, I3 -> 4 a: in total 4 pi a.
  const double a = 0.7;
  auto tpl = GridFunction::log_grid(1e-3, 1e4, 2048);
  GridFunction g = tpl;
  for (std::size_t i = 0; i < g.size(); ++i)
    g.values[i] = g.x[i] >= 0.1 ? a * std::pow(g.x[i], -2.25) : 0.0;
  auto rep = coag::flux_linearized(g, 100.0, p, 1e-6);
  CHECK(std::abs(rep.I1 / ((4.0 * kPi - 8.0) * a) - 1.0) < 0.03);
  CHECK(std::abs(rep.I2 / (4.0 * a) - 1.0) < 0.03);
  CHECK(std::abs(rep.I3 / (4.0 * a) - 1.0) < 0.03);
  CHECK(std::abs(rep.J_minus / (4.0 * kPi * a) - 1.0) < 0.03);
}

TEST_CASE("linearized flux of a compact bump vanishes as R grows") {
  const KernelParams p(1.5);
  auto tpl = GridFunction::log_grid(1e-3, 1e3, 1024);
  auto g = coag::mollified_delta(tpl, 1.0, 4.0);
  const double j10 = coag::flux_linearized(g, 10.0, p, 1e-7).J_minus;
  const double j100 = coag::flux_linearized(g, 100.0, p, 1e-7).J_minus;
  CHECK(std::abs(j100) < 0.5 * std::abs(j10));
  CHECK(std::abs(j100) < 0.05);
}

TEST_CASE("mass balance along a direct trajectory") {
  const KernelParams p(1.5);
  auto tpl = GridFunction::log_grid(1e-3, 1e3, 1024);
  auto g0 = coag::mollified_delta(tpl, 1.0, 4.0);
  coag::SolverConfig cfg;
  cfg.t_end = 0.25;
  cfg.checkpoints = {0.05, 0.1, 0.15, 0.2, 0.25};
  auto tr = coag::evolve(g0, cfg, p);
  const double res = coag::mass_balance(tr, 20.0, p, 1e-5);
  CHECK(res < 0.02);
}

TEST_CASE("admissibility of initial data") {
  const KernelParams p(1.5);
  InitialDatum ok;
  ok.sampler = [](double x) {
    const double u = std::log(x);
    return std::exp(-u * u);
  };
  ok.decay_exp_zero = 0.0;
  ok.decay_exp_inf = 3.0;
  CHECK(coag::ivp_admissible(ok, p));

  InitialDatum bad = ok;
  bad.decay_exp_inf = 0.5;  // not integrable at infinity
  CHECK(!coag::ivp_admissible(bad, p));
}

TEST_CASE("superposition solution sifts a narrow initial bump") {
  const auto& fs = fs15();
  InitialDatum h0;
  const double w = 0.02;
  h0.sampler = [w](double y) {
    const double u = std::log(y) / w;
    // unit count: integral of h0 dy/y ... normalized below in the check
    return std::exp(-0.5 * u * u) / (w * std::sqrt(2.0 * kPi));
  };
  h0.decay_exp_zero = 0.0;
  h0.decay_exp_inf = 4.0;
  h0.support_lo = std::exp(-8.0 * w);
  h0.support_hi = std::exp(8.0 * w);
  const double t = 0.4;
  for (double x : {0.8, 1.0, 1.6}) {
    const double h = coag::solve_ivp(h0, t, x, fs, 1e-4);
    const double g = fs.rescale_fundamental(t, x, 1.0);
    CHECK(std::abs(h - g) < 0.02 * std::max(std::abs(g), 0.05));
  }
}

TEST_CASE("superposition recovers the initial datum as t -> 0") {
  const auto& fs = fs15();
  InitialDatum h0;
  h0.sampler = [](double y) {
    const double u = std::log(y);
    return std::exp(-2.0 * u * u);
  };
  h0.decay_exp_zero = 0.0;
  h0.decay_exp_inf = 4.0;
  h0.support_lo = 0.05;
  h0.support_hi = 20.0;
  for (double x : {0.8, 1.0, 1.3}) {
    const double h = coag::solve_ivp(h0, 1e-3, x, fs, 1e-4);
    CHECK(std::abs(h - h0.sampler(x)) < 0.02 * h0.sampler(1.0));
  }
}

TEST_CASE("superposition is linear in the datum") {
  const auto& fs = fs15();
  InitialDatum h0;
  h0.sampler = [](double y) {
    const double u = std::log(y);
    return std::exp(-2.0 * u * u);
  };
  h0.decay_exp_zero = 0.0;
  h0.decay_exp_inf = 4.0;
  h0.support_lo = 0.05;
  h0.support_hi = 20.0;
  InitialDatum h2 = h0;
  h2.sampler = [&](double y) {
    const double u = std::log(y);
    return 2.5 * std::exp(-2.0 * u * u);
  };
  const double a = coag::solve_ivp(h0, 0.3, 1.2, fs, 1e-5);
  const double b = coag::solve_ivp(h2, 0.3, 1.2, fs, 1e-5);
  CHECK(b == doctest::Approx(2.5 * a).epsilon(1e-4));
}
