#include <cmath>
#include <random>

#include "coag/cheb.hpp"
#include "coag/complex_special.hpp"
#include "coag/quadrature.hpp"
#include "doctest.h"

using coag::Complex;
using coag::HorizontalContour;
using coag::kPi;

TEST_CASE("Gaussian on the real axis") {
  HorizontalContour c;
  c.height = 0.0;
  c.half_length = 8.0;
  auto r = coag::integrate_line([](Complex y) { return std::exp(-y * y); }, c,
                                1e-12);
  CHECK(r.converged);
  CHECK(std::abs(r.value - Complex{std::sqrt(kPi), 0.0}) < 1e-12);
}

TEST_CASE("Lorentzian with adaptive truncation from the envelope") {
  // tail of 1/(1+y^2) beyond T is ~ 2/T; pick T so the remainder is < 1e-11
  const double T = 2.0e11;
  HorizontalContour c;
  c.height = 0.0;
  c.half_length = T;
  c.node_budget = 2000000;
  auto r = coag::integrate_line([](Complex y) { return 1.0 / (1.0 + y * y); },
                                c, 1e-11);
  CHECK(std::abs(r.value - Complex{kPi, 0.0}) < 1e-10);
}

TEST_CASE("Gamma-decay truncation keeps the tail below 1e-12") {
  // |Gamma(i y)| ~ sqrt(2 pi / |y|) e^{-pi |y| / 2}; the envelope-derived T
  // must leave a tail smaller than 1e-12 of the running total.
  const double T = coag::truncation_for_exponential_tail(3.0, 0.5 * kPi, 1e-13);
  HorizontalContour c;
  c.height = 0.4;  // off the pole line of Gamma(i y)
  c.half_length = T;
  auto f = [](Complex y) {
    return std::exp(coag::log_gamma(coag::kImag * y).as_complex());
  };
  auto r = coag::integrate_line(f, c, 1e-13);
  HorizontalContour c2 = c;
  c2.half_length = 2.0 * T;
  auto r2 = coag::integrate_line(f, c2, 1e-13);
  CHECK(std::abs(r.value - r2.value) < 1e-12 * std::abs(r.value));
}

TEST_CASE("error estimates are conservative on analytic integrands") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> amp(0.3, 3.0), freq(0.3, 4.0);
  int conservative = 0;
  const int total = 40;
  for (int i = 0; i < total; ++i) {
    const double a = amp(rng), w = freq(rng), s = amp(rng);
    // integral of a * exp(-s y^2) cos(w y) over R = a sqrt(pi/s) e^{-w^2/(4s)}
    const double exact = a * std::sqrt(kPi / s) * std::exp(-w * w / (4.0 * s));
    HorizontalContour c;
    c.height = 0.0;
    c.half_length = 30.0 / std::sqrt(s);
    auto r = coag::integrate_line(
        [&](Complex y) {
          return a * std::exp(-s * y * y) * std::cos(w * y.real());
        },
        c, 1e-10);
    if (std::abs(r.value.real() - exact) <= std::max(r.error_estimate, 1e-15))
      ++conservative;
  }
  CHECK(conservative >= 38);  // >= 95%
}

TEST_CASE("shift_line collects the residue of a simple pole") {
  // f(Y) = Gamma(2 i Y / (lambda-1)) has a simple pole at Y = 0 with residue
  // (lambda-1)/(2i).
  const double lam = 1.5;
  auto f = [&](Complex y) {
    return std::exp(
        coag::log_gamma(2.0 * coag::kImag * y / (lam - 1.0)).as_complex());
  };
  HorizontalContour from;
  from.height = -0.1;
  from.half_length = 14.0;
  auto rec = coag::shift_line(f, from, 0.11, {Complex{0.0, 0.0}}, 1e-10);
  const Complex expected = (lam - 1.0) / (2.0 * coag::kImag);
  REQUIRE(rec.crossed.size() == 1);
  CHECK(std::abs(rec.crossed[0].residue - expected) < 1e-9);
  CHECK(rec.identity_ok);

  // round trip returns to the original value with an empty net residue set
  HorizontalContour up = from;
  up.height = 0.11;
  auto back = coag::shift_line(f, up, -0.1, {Complex{0.0, 0.0}}, 1e-10);
  CHECK(std::abs(back.crossed[0].contribution + rec.crossed[0].contribution) <
        1e-9);
}

TEST_CASE("shift_line with no singularities between heights") {
  auto f = [](Complex y) { return std::exp(-y * y); };
  HorizontalContour from;
  from.height = 0.0;
  from.half_length = 9.0;
  auto rec = coag::shift_line(f, from, 0.3, {}, 1e-11);
  CHECK(rec.crossed.empty());
  CHECK(std::abs(rec.integral_from - rec.integral_to) < 2e-11);
}

TEST_CASE("critical point closed form and validity flag") {
  const coag::KernelParams p(1.5);
  // lambda = 3/2, t = 1, Q = +1: Z_c = 0.25 sqrt(2 pi) (1+i) / (2i)
  auto cp = coag::critical_point(Complex{200.0, 1.8}, 1.0, p);
  const Complex expected =
      0.5 * std::sqrt(2.0 * kPi) * Complex{1.0, 1.0} / (2.0 * coag::kImag);
  CHECK(std::abs(cp.location - expected) < 1e-14);
  CHECK(cp.validity);
  auto cp2 = coag::critical_point(Complex{3.0, 1.8}, 0.1, p);
  CHECK(!cp2.validity);
}

TEST_CASE("piecewise Chebyshev table round trip and derivative") {
  auto f = [](double x) {
    return Complex{std::sin(3.0 * x), std::exp(-x * x)};
  };
  auto tab = coag::ChebLineTable::build(f, -4.0, 6.0, 1e-12);
  auto d = tab.derivative();
  for (double x : {-3.7, -0.2, 0.0, 1.1, 4.9, 5.99}) {
    CHECK(std::abs(tab.eval(x) - f(x)) < 1e-10);
    const Complex expected{3.0 * std::cos(3.0 * x),
                           -2.0 * x * std::exp(-x * x)};
    CHECK(std::abs(d.eval(x) - expected) < 1e-8);
  }
}
