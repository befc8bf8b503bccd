#pragma once

#include "coag/types.hpp"

namespace coag {

/// log Gamma(z) split into modulus and phase. `argument` is the imaginary part
/// of the branch that is real on the positive real axis and analytic off the
/// cut along the non-positive reals (for Re z < 0.5 it is reduced modulo 2*pi,
/// which is immaterial after exponentiation).
struct LogGammaResult {
  double log_modulus;
  double argument;

  Complex as_complex() const { return Complex{log_modulus, argument}; }
};

/// log Gamma(z). Lanczos sum for moderate |z|, Stirling with Bernoulli
/// corrections for large |z|, reflection for Re z < 0.5.
/// Throws NumericsError when z is (numerically) a non-positive integer.
LogGammaResult log_gamma(Complex z);

/// Gamma(z) via exp(log_gamma). Overflows to inf rather than producing NaN.
Complex gamma(Complex z);

/// log(Gamma(a)/Gamma(b)). For large nearby arguments the difference of the
/// two Stirling series is rearranged so no large terms cancel (the naive
/// difference loses eps * |log Gamma| absolute accuracy, which matters along
/// long contours); otherwise it is the plain difference of log_gamma values.
/// The imaginary part is continuous only up to multiples of 2 pi.
Complex log_gamma_ratio(Complex a, Complex b);

/// Gamma(a)/Gamma(b) computed as exp(log_gamma_ratio(a, b)).
/// Returns exact 0 when b is a pole of Gamma and a is not; throws when both
/// are poles.
Complex gamma_ratio(Complex a, Complex b);

/// Stirling remainder A(z) defined by Gamma(z) = sqrt(2 pi) e^{-z} z^{z-1/2} A(z).
/// Requires arg(z) bounded away from the negative real axis; A(z) -> 1 as
/// |z| -> infinity inside that cone.
Complex stirling_correction(Complex z);

/// True when z is within `eps` of a non-positive integer (a Gamma pole).
bool near_gamma_pole(Complex z, double eps = 1e-13);

}  // namespace coag
