#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "coag/types.hpp"

namespace coag {

/// A horizontal integration line Im(w) = height, truncated to
/// Re(w) in [center - half_length, center + half_length].
struct HorizontalContour {
  double height = 0.0;
  double half_length = 0.0;
  int node_budget = 400000;
  double center = 0.0;

  /// Extra abscissae (in the Re coordinate) where panel boundaries are forced,
  /// e.g. sharp features of the integrand.
  std::vector<double> anchors;
};

struct IntegralResult {
  Complex value{0.0, 0.0};
  double error_estimate = 0.0;
  long evals = 0;
  bool converged = false;
};

using ComplexIntegrand = std::function<Complex(Complex)>;

/// Adaptive Gauss-Kronrod (7-15) integration of f along the contour,
/// traversed left to right. `tol` is an absolute target for the accumulated
/// error estimate. Throws NumericsError only on invalid input; an unreachable
/// tolerance is reported through `converged = false`.
IntegralResult integrate_line(const ComplexIntegrand& f,
                              const HorizontalContour& c, double tol);

/// Adaptive integration of a complex-valued function over the real
/// interval [a, b].
IntegralResult integrate_real(const std::function<Complex(double)>& f, double a,
                              double b, double tol, int node_budget = 400000);

/// Truncation helper: smallest T with integral of coef*exp(-rate*|u|) beyond T
/// below `tail_bound`.
double truncation_for_exponential_tail(double coef, double rate,
                                       double tail_bound);

/// Residue of f at `at` by trapezoidal quadrature on a small circle
/// (exponentially convergent). The radius must keep the circle inside the
/// domain of analyticity of f around the (isolated) singularity.
Complex residue_circle(const ComplexIntegrand& f, Complex at, double radius,
                       int nodes = 64);

struct CrossedSingularity {
  Complex location;
  Complex residue;
  /// Contribution C with sign fixed so that
  /// integral(from) - integral(to) = sum of C over crossed singularities.
  Complex contribution;
};

struct ShiftRecord {
  double from_height = 0.0;
  double to_height = 0.0;
  std::vector<CrossedSingularity> crossed;
  Complex integral_from{0.0, 0.0};
  Complex integral_to{0.0, 0.0};
  double identity_residual = 0.0;  // |from - to - sum(contributions)|
  bool identity_ok = false;
};

/// Moves a horizontal contour to a new height, collecting residues of the
/// singularities listed in `between` (must lie strictly between the two
/// heights). Verifies the residue identity within 2*tol.
ShiftRecord shift_line(const ComplexIntegrand& f, const HorizontalContour& from,
                       double to_height, const std::vector<Complex>& between,
                       double tol);

struct CriticalPoint {
  Complex location{0.0, 0.0};
  double scale = 0.0;  // sqrt(|xi|) * t
  bool validity = false;
};

/// Leading-order saddle of the rescaled phase of the Fourier-side
/// representation: Z_c = (lambda-1) sqrt(2 pi) t (1 + iQ) / (2i) with
/// Q = sign(Re xi). Valid once |xi| t^2 exceeds `threshold`; optionally
/// polished by one Newton step using a caller-supplied derivative of the
/// phase with respect to Z.
CriticalPoint critical_point(
    Complex xi, double t, const KernelParams& p, double threshold = 100.0,
    const std::function<Complex(Complex)>& phase_dZ = nullptr);

}  // namespace coag
