#pragma once

#include <complex>

// Test-only high-precision log Gamma oracle, independent of the library
// implementation: extended-precision Stirling series pushed far from the
// origin by exact recurrence shifts (the library uses a Lanczos sum in double
// precision for moderate arguments). Accurate to ~1e-17 relative, enough to
// certify 1e-13 targets.
namespace oracle {

std::complex<long double> log_gamma(std::complex<long double> z);

inline std::complex<double> log_gamma_d(std::complex<double> z) {
  const auto r = log_gamma(std::complex<long double>(z.real(), z.imag()));
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

inline std::complex<double> gamma_d(std::complex<double> z) {
  const auto r = log_gamma(std::complex<long double>(z.real(), z.imag()));
  const auto e = std::exp(r);
  return {static_cast<double>(e.real()), static_cast<double>(e.imag())};
}

}  // namespace oracle
