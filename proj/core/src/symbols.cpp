#include "coag/symbols.hpp"

#include <algorithm>
#include <cmath>

#include "coag/complex_special.hpp"
#include "coag/quadrature.hpp"

namespace coag {

const Singularity* SingularityCatalog::find(Complex at, double eps) const {
  for (const auto& s : entries)
    if (std::abs(s.location - at) <= eps) return &s;
  return nullptr;
}

Complex eval_M(Complex s) {
  if (near_gamma_pole(s))
    throw NumericsError("eval_M: s is a pole (non-positive integer)");
  return -2.0 * kSqrtPi * gamma_ratio(s, s - 0.5);
}

Complex eval_M_integral_oracle(Complex s, double tol) {
  if (!(s.real() > 1.0))
    throw NumericsError("eval_M_integral_oracle: requires Re(s) > 1");
  // Split at 1/2; substitute theta = v^4 on the left to absorb theta^(s-2)
  // and theta = 1 - u^2 on the right to absorb (1-theta)^(-1/2).
  auto left = integrate_real(
      [&](double v) -> Complex {
        const double theta = v * v * v * v;
        return 4.0 * std::pow(1.0 - theta, -0.5) *
               std::exp((s - 2.0) * std::log(theta)) * (v * v * v);
      },
      0.0, std::pow(0.5, 0.25), 0.25 * tol);
  auto right = integrate_real(
      [&](double u) -> Complex {
        const double theta = 1.0 - u * u;
        return 2.0 * std::exp((s - 2.0) * std::log(theta));
      },
      0.0, std::sqrt(0.5), 0.25 * tol);
  if (!left.converged || !right.converged)
    throw NumericsError("eval_M_integral_oracle: quadrature tolerance unreachable");
  return -2.0 * (s - 1.0) * (left.value + right.value);
}

Complex eval_M_asymptotic(Complex s) {
  if (!(std::abs(std::arg(s)) < kPi - 1e-9))
    throw NumericsError("eval_M_asymptotic: outside the cone |arg s| < pi");
  return -2.0 * std::sqrt(kPi * s) * (1.0 - 3.0 / (8.0 * s));
}

Complex eval_Phi(Complex xi, const KernelParams& p) {
  const Complex num = kImag * xi + (1.0 + 0.5 * p.lambda);
  const Complex den = kImag * xi + 0.5 * (p.lambda + 1.0);
  if (near_gamma_pole(num))
    throw NumericsError("eval_Phi: xi is a pole of Phi");
  return -2.0 * kSqrtPi * gamma_ratio(num, den);
}

Complex eval_Phi_asymptotic(Complex xi, const KernelParams& p, int order) {
  if (xi.real() == 0.0)
    throw NumericsError("eval_Phi_asymptotic: requires Re(xi) != 0");
  const double q = xi.real() > 0.0 ? 1.0 : -1.0;
  const Complex root = std::sqrt(q * xi);
  Complex v = -kSqrtTwoPi * Complex{1.0, q} * root;
  // First correction from M(s) = -2 sqrt(pi s)(1 - 3/(8s)) under the shift
  // s = i xi + 1 + lambda/2: the leading term is multiplied by
  // (1 - i (1/8 + lambda/4) / xi).
  if (order >= 1)
    v += kSqrtTwoPi * Complex{1.0, q} * kImag / xi * root *
         (0.125 + 0.25 * p.lambda);
  return v;
}

SingularityCatalog catalog_singularities(const KernelParams& p, int count) {
  if (count < 1) throw NumericsError("catalog_singularities: count >= 1");
  SingularityCatalog cat;
  for (int n = 0; n < count; ++n) {
    cat.entries.push_back({Singularity::Kind::Zero,
                           Complex{0.0, n + 0.5 * (1.0 + p.lambda)}, n, 0, 1});
    cat.entries.push_back({Singularity::Kind::Pole,
                           Complex{0.0, 1.0 + 0.5 * p.lambda + n}, n, 0, 1});
  }
  std::sort(cat.entries.begin(), cat.entries.end(),
            [](const Singularity& a, const Singularity& b) {
              return a.location.imag() < b.location.imag();
            });
  return cat;
}

BranchTracker::BranchTracker(const KernelParams& p, double anchor_re,
                             double height)
    : params_(p), height_(height), last_re_(anchor_re), last_arg_(0.0) {}

Complex BranchTracker::eval(double re) {
  const Complex xi{re, height_};
  const Complex value = -eval_Phi(xi, params_);
  const double mag = std::log(std::abs(value));
  double arg = std::arg(value);
  if (!primed_) {
    // Anchor: fold into (pi/4 - pi, pi/4 + pi], the window centered on the
    // limiting argument at Re -> +infinity.
    while (arg > 0.25 * kPi + kPi) arg -= kTwoPi;
    while (arg <= 0.25 * kPi - kPi) arg += kTwoPi;
    primed_ = true;
  } else {
    while (arg - last_arg_ > kPi) {
      arg -= kTwoPi;
      ++unwinds_;
    }
    while (arg - last_arg_ < -kPi) {
      arg += kTwoPi;
      ++unwinds_;
    }
    if (std::abs(arg - last_arg_) > 0.5 * kPi)
      throw NumericsError(
          "BranchTracker: argument jump exceeds pi/2; refine the contour");
  }
  last_re_ = re;
  last_arg_ = arg;
  return Complex{mag, arg};
}

Complex log_neg_Phi(Complex xi, const KernelParams& p) {
  const Complex v = -eval_Phi(xi, p);
  return std::log(v);  // principal branch; anchor-consistent on the window
}

}  // namespace coag
