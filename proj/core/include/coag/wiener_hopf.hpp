#pragma once

#include <map>
#include <optional>
#include <vector>
#include <string>
#include <unordered_map>

#include "coag/cheb.hpp"
#include "coag/symbols.hpp"
#include "coag/types.hpp"

namespace coag {

/// Result of evaluating the factor at a point, with the local zero/pole order
/// split off. Near a singularity s of order m the factor behaves like
///   V(s + eps) ~ exp(log_reg) * eps^m,
/// so `log_reg` carries V itself (m = 0), the derivative at a simple zero
/// (m = 1), or the residue at a simple pole (m = -1).
struct VValue {
  Complex log_reg{0.0, 0.0};
  int order = 0;
  bool near_singularity = false;  // within the guard radius of a singularity
  Complex nearest_singularity{0.0, 0.0};

  bool is_zero() const { return order > 0; }
  bool is_pole() const { return order < 0; }
  Complex value() const {
    if (order > 0) return Complex{0.0, 0.0};
    if (order < 0)
      throw NumericsError("VValue: pole has no finite value");
    return std::exp(log_reg);
  }
};

/// The solution V of V(xi) = -V(xi + i(lambda-1)/2) Phi(xi + i(lambda-1)/2),
/// built as the exponential of a Cauchy-type integral of log(-Phi) along a
/// horizontal line inside ((2+lambda)/2, (3+lambda)/2), in the gauge fixed by
/// arg(-Phi) -> pi/4 as Re -> +infinity. Directly valid for Im(xi) in an open
/// strip of width (lambda-1)/2 below the construction line; extended to the
/// plane through the difference equation.
class WienerHopfFactor {
 public:
  explicit WienerHopfFactor(KernelParams p,
                            std::optional<double> beta1 = std::nullopt,
                            double tol = 1e-11);

  const KernelParams& params() const { return params_; }
  double beta1() const { return beta1_; }
  double tol() const { return tol_; }

  /// True when the Cauchy-integral representation with construction height
  /// `beta` is directly applicable at xi.
  bool in_strip(Complex xi, double beta, double margin = 0.0) const;

  /// log V(xi) for xi inside the strip below `beta` (or the canonical height
  /// when omitted). The imaginary part is defined modulo 2*pi.
  Complex log_V_strip(Complex xi, std::optional<double> beta = std::nullopt) const;

  /// V at an arbitrary point, with zero/pole order flags; uses the strip
  /// representation composed with difference-equation steps.
  VValue extend_V(Complex xi) const;

  /// Convenience: plain value (0 at zeros; throws at poles).
  Complex eval_V(Complex xi) const { return extend_V(xi).value(); }
  Complex log_V(Complex xi) const;

  /// V(xi)/V(y) through the combined single Cauchy integral; both points must
  /// lie in a common construction strip. Better conditioned than the quotient
  /// when |Re xi - Re y| is large.
  Complex eval_V_ratio(Complex xi, Complex y) const;

  /// log(V(xi)/V(y)) as the combined Cauchy integral itself: continuous (in
  /// fact analytic) in both arguments inside a common strip, unlike the
  /// principal log of the exponentiated ratio. Outside the strip the points
  /// are shifted in by the difference equation and the matching log(-Phi)
  /// factors are added (then defined modulo 2 pi i only).
  Complex log_V_ratio(Complex xi, Complex y) const;

  /// Ensures a cached Chebyshev fit of log(-Phi) along the line Im = beta
  /// covers [lo, hi]; keeps per-window segments for far-out excursions.
  /// Defaults to the canonical construction line.
  void prepare_lphi_segment(double lo, double hi,
                            std::optional<double> beta = std::nullopt) const;

  /// True when the cached fit behind log_V_line already covers |Re| <= extent.
  bool line_ready(double height, double extent) const;
  /// Force-builds the fit for the line at the given extent (one fit per
  /// height; a wider request replaces a narrower fit).
  void warm_line(double height, double extent) const;

  /// Contour height used by the combined ratio integral for two points of
  /// the given imaginary parts: the midpoint of the gap between the two
  /// B1-pole ladders, clamped to the admissible window. The ratio integrand
  /// carries no regularizer, so this height is gauge-free.
  double ratio_contour_height(double im_xi, double im_y) const;

  /// Zeros and poles of V with their net orders (overlapping zero/pole
  /// candidates from the two family ladders cancel for special lambda and are
  /// dropped). At most `count` entries of each signed kind.
  SingularityCatalog catalog_V_singularities(int count) const;

  /// Net order of V at a purely imaginary candidate point.
  int order_at(Complex at) const;

  /// Residue at a catalogued simple pole (via the regularized extension).
  Complex residue_V(Complex at) const;

  /// Derivative by small-circle integration; valid where V is analytic.
  Complex derivative_V(Complex at, double radius = 0.08) const;

  /// log V along the horizontal line Im = height evaluated through a cached
  /// piecewise-Chebyshev fit of the in-strip representation plus cheap
  /// difference-equation factors. The fit covers |Re| <= range and falls back
  /// to direct evaluation outside it.
  Complex log_V_line(double height, double re, double range = 160.0) const;

  /// Guard radius around catalogued singularities for extension arithmetic.
  double guard_radius() const { return guard_radius_; }

  /// Serialization of the point cache and construction key.
  void save_cache(const std::string& path) const;
  static WienerHopfFactor load_cache(const std::string& path);

  /// Number of cached strip evaluations (diagnostics).
  std::size_t cache_size() const { return point_cache_.size(); }

 private:
  Complex cauchy_log_V(Complex xi, double beta) const;
  Complex log_neg_phi_cached(double re, double beta) const;

 public:
  /// Shift count and factor sum bringing xi into the canonical strip:
  /// log V(xi) = factor_sum + log V(xi + i k d). The sum of principal logs
  /// is defined modulo 2 pi i.
  Complex strip_shift_factors(Complex xi, int* k_out) const;
  /// Value form of the same product, V(xi) = product * V(xi + i k d);
  /// continuous in xi (no branch cuts), suitable for interpolation.
  Complex strip_shift_product(Complex xi, int* k_out) const;

 private:

  KernelParams params_;
  double beta1_;
  double tol_;
  double guard_radius_ = 0.05;
  SingularityCatalog phi_catalog_;

  // log(-Phi) Chebyshev fits along the canonical construction line: the
  // always-present core around the origin plus far-out segments on demand.
  ChebLineTable lphi_line_;
  double lphi_height_ = 0.0;
  struct LphiSegment {
    double beta;
    ChebLineTable tab;
  };
  mutable std::vector<LphiSegment> lphi_segments_;

  // In-strip log V line fits, keyed by quantized height.
  mutable std::map<long long, ChebLineTable> logv_lines_;

  // Quantized point cache of strip evaluations.
  mutable std::unordered_map<long long, Complex> point_cache_;
};

}  // namespace coag
