#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace coag {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline const double kSqrtPi = std::sqrt(kPi);
inline const double kSqrtTwoPi = std::sqrt(kTwoPi);
inline constexpr Complex kImag{0.0, 1.0};

/// Homogeneity exponent of the kernel K(x,y) = (xy)^(lambda/2) and the
/// constants derived from it. The whole construction requires 1 < lambda < 2.
struct KernelParams {
  double lambda;

  explicit KernelParams(double lambda_) : lambda(lambda_) {
    if (!(lambda > 1.0 && lambda < 2.0))
      throw std::invalid_argument("KernelParams: lambda must lie in (1,2), got " +
                                  std::to_string(lambda_));
  }

  /// Vertical shift (lambda-1)/2 appearing in the Fourier difference equation.
  double shift() const { return 0.5 * (lambda - 1.0); }
  /// 4*pi/(lambda-1), the exponential rate of the conformal map used in the
  /// Cauchy-integral construction of the factor.
  double kappa() const { return 4.0 * kPi / (lambda - 1.0); }
  /// Lower edge of the analyticity strip S.
  double strip_lo() const { return 1.5; }
  /// Upper edge of the analyticity strip S.
  double strip_hi() const { return 0.5 * (3.0 + lambda); }
};

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace coag
