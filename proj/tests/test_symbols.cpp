#include <cmath>
#include <random>

#include "coag/complex_special.hpp"
#include "coag/symbols.hpp"
#include "doctest.h"
#include "gamma_oracle.hpp"

using coag::Complex;
using coag::KernelParams;
using coag::kPi;

namespace {
double rel(Complex a, Complex b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}
}  // namespace

TEST_CASE("M at rational points") {
  CHECK(std::abs(coag::eval_M({0.5, 0.0})) < 1e-14);  // first zero
  CHECK(rel(coag::eval_M({1.0, 0.0}), {-2.0, 0.0}) < 1e-14);
  CHECK(rel(coag::eval_M({2.0, 0.0}), {-4.0, 0.0}) < 1e-14);
  CHECK(rel(coag::eval_M({3.0, 0.0}), {-16.0 / 3.0, 0.0}) < 1e-14);
  for (int n = 0; n <= 5; ++n)
    CHECK(std::abs(coag::eval_M({0.5 - n, 0.0})) < 1e-12);
  CHECK_THROWS_AS((void)coag::eval_M({0.0, 0.0}), coag::NumericsError);
  CHECK_THROWS_AS((void)coag::eval_M({-2.0, 0.0}), coag::NumericsError);
}

TEST_CASE("Beta-integral oracle adjudicates the closed-form prefactor") {
  // The defining integral -2(s-1) int_0^1 (1-th)^{-1/2} th^{s-2} dth equals
  // -2 sqrt(pi) Gamma(s)/Gamma(s-1/2): the sqrt(pi) prefactor, not sqrt(2).
  for (Complex s : {Complex{2.0, 0.0}, Complex{3.0, 0.0}, Complex{1.5, 0.0},
                    Complex{5.0, 0.0}, Complex{2.0, 3.0}}) {
    const Complex viaint = coag::eval_M_integral_oracle(s, 1e-12);
    CHECK(rel(viaint, coag::eval_M(s)) < 1e-10);
    const Complex wrong = std::sqrt(2.0 / kPi) * coag::eval_M(s);
    CHECK(rel(viaint, wrong) > 0.1);
  }
  CHECK_THROWS_AS((void)coag::eval_M_integral_oracle({0.9, 0.0}),
                  coag::NumericsError);
}

TEST_CASE("Phi zeros, poles, and the shift identity") {
  const KernelParams p(1.5);
  CHECK(std::abs(coag::eval_Phi({0.0, 1.25}, p)) < 1e-13);  // i(1+lambda)/2
  CHECK(std::abs(coag::eval_Phi({0.0, 2.25}, p)) < 1e-13);  // next zero
  CHECK_THROWS_AS((void)coag::eval_Phi({0.0, 1.75}, p), coag::NumericsError);

  // Phi(0) = -2 sqrt(pi) Gamma(1.75)/Gamma(1.25) against the oracle
  const Complex expected = -2.0 * std::sqrt(kPi) * oracle::gamma_d({1.75, 0.0}) /
                           oracle::gamma_d({1.25, 0.0});
  CHECK(rel(coag::eval_Phi({0.0, 0.0}, p), expected) < 1e-13);

  // shift identity Phi(xi) = M(i xi + 1 + lambda/2) wherever defined
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> ure(-30.0, 30.0), uim(-3.0, 3.0);
  for (int i = 0; i < 40; ++i) {
    const Complex xi{ure(rng), uim(rng)};
    const Complex s = coag::kImag * xi + (1.0 + 0.5 * p.lambda);
    if (coag::near_gamma_pole(s, 1e-3)) continue;
    CHECK(rel(coag::eval_Phi(xi, p), coag::eval_M(s)) < 1e-12);
  }
}

TEST_CASE("Phi conjugation symmetry") {
  const KernelParams p(1.7);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ure(0.1, 50.0), uim(-2.0, 2.0);
  for (int i = 0; i < 30; ++i) {
    const Complex xi{ure(rng), uim(rng)};
    const Complex a = coag::eval_Phi(-std::conj(xi), p);
    const Complex b = std::conj(coag::eval_Phi(xi, p));
    CHECK(rel(a, b) < 1e-12);
  }
}

TEST_CASE("Phi large-argument expansion, both signs") {
  const KernelParams p(1.5);
  for (double sgn : {1.0, -1.0}) {
    const Complex xi{sgn * 400.0, 1.9};
    const Complex exact = coag::eval_Phi(xi, p);
    const Complex a1 = coag::eval_Phi_asymptotic(xi, p, 1);
    CHECK(rel(a1, exact) < 1e-3);
    const Complex a0 = coag::eval_Phi_asymptotic(xi, p, 0);
    CHECK(rel(a0, exact) < 2e-2);
    CHECK(rel(a1, exact) < rel(a0, exact));
  }
  // symmetry of the expansion itself
  const Complex xi{123.0, 0.0};
  CHECK(rel(coag::eval_Phi_asymptotic(-std::conj(xi), p, 1),
            std::conj(coag::eval_Phi_asymptotic(xi, p, 1))) < 1e-14);
}

TEST_CASE("M large-argument expansion and its error slope") {
  CHECK(rel(coag::eval_M_asymptotic({100.0, 0.0}), coag::eval_M({100.0, 0.0})) <
        1e-3);
  CHECK(rel(coag::eval_M_asymptotic({1e4, 0.0}), coag::eval_M({1e4, 0.0})) <
        1e-5);
  // residual decays like |s|^{-2}
  std::vector<double> ls, lr;
  for (double s : {1e2, 1e3, 1e4}) {
    ls.push_back(std::log(s));
    lr.push_back(std::log(rel(coag::eval_M_asymptotic({s, 0.0}),
                              coag::eval_M({s, 0.0}))));
  }
  const double slope = (lr[2] - lr[0]) / (ls[2] - ls[0]);
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("catalog of Phi singularities") {
  const KernelParams p(1.5);
  auto cat = coag::catalog_singularities(p, 6);
  REQUIRE(cat.entries.size() == 12);
  CHECK(cat.entries[0].kind == coag::Singularity::Kind::Zero);
  CHECK(cat.entries[0].location == Complex{0.0, 1.25});
  CHECK(cat.entries[1].kind == coag::Singularity::Kind::Pole);
  CHECK(cat.entries[1].location == Complex{0.0, 1.75});
  // interlacing with spacing one inside each family
  for (std::size_t i = 2; i < cat.entries.size(); ++i)
    CHECK(cat.entries[i].location.imag() - cat.entries[i - 2].location.imag() ==
          doctest::Approx(1.0));
  // zero / pole certification with a tiny perturbation
  for (const auto& s : cat.entries) {
    const Complex z = s.location + Complex{1e-10, 0.0};
    const Complex v = coag::eval_Phi(z, p);
    if (s.kind == coag::Singularity::Kind::Zero)
      CHECK(std::abs(v) < 1e-8);
    else
      CHECK(std::abs(1.0 / v) < 1e-8);
  }
}

TEST_CASE("branch tracking: argument of -Phi across a symmetric contour") {
  const KernelParams p(1.5);
  const double beta1 = 2.0;
  // Anchor at the right end; arg(-Phi) tends to +pi/4 there, -pi/4 at the
  // far left, so the total variation is pi/2 on the canonical window (no
  // enclosed zeros or poles).
  coag::BranchTracker tracker(p, 1e4, beta1);
  double arg_right = 0.0, arg_left = 0.0;
  bool first = true;
  for (double re = 1e4; re >= 10.0; re *= 0.8) {
    arg_left = tracker.eval(re).imag();
    if (first) {
      arg_right = arg_left;
      first = false;
    }
  }
  for (double re = 10.0; re >= -10.0; re -= 0.25)
    arg_left = tracker.eval(re).imag();
  for (double re = -10.0; re >= -1e4; re *= 1.25)
    arg_left = tracker.eval(re).imag();

  CHECK(std::abs(arg_right - 0.25 * kPi) < 0.02);
  CHECK(std::abs(arg_left + 0.25 * kPi) < 0.02);
  CHECK(std::abs((arg_right - arg_left) - 0.5 * kPi) < 0.04);
  CHECK(tracker.unwind_count() == 0);  // principal branch suffices here

  // the pointwise normalized log agrees with the tracked branch on the window
  CHECK(std::abs(coag::log_neg_Phi({1e4, beta1}, p).imag() - 0.25 * kPi) < 0.02);
}

TEST_CASE("branch tracker rejects jumps above pi/2") {
  const KernelParams p(1.5);
  // Just above the first zero of Phi the argument swings by ~pi across
  // Re = 0; a single coarse hop over it must trip the resolution guard.
  coag::BranchTracker tracker(p, 0.5, 1.26);
  tracker.eval(0.5);
  CHECK_THROWS_AS((void)tracker.eval(-0.5), coag::NumericsError);
}
