#pragma once

#include <map>
#include <optional>
#include <vector>

#include "coag/cheb.hpp"
#include "coag/types.hpp"
#include "coag/wiener_hopf.hpp"

namespace coag {

struct GhatEvaluation {
  double t = 0.0;
  Complex xi{0.0, 0.0};
  Complex value{0.0, 0.0};
  double error_estimate = 0.0;
};

/// Tabulated profile, written to CSV by the CLI.
struct ProfileTable {
  enum class Regime { SmallTime, LargeTime, FiniteTimeTail };
  Regime regime;
  double lambda = 0.0;
  double t = 0.0;  // 0 when not applicable
  double tol = 0.0;
  std::vector<double> abscissae;
  std::vector<double> values;
  std::vector<double> reference;  // oracle / comparison column (may be empty)
};

/// Fourier-side fundamental solution and its real-space inversions, bound to
/// a Wiener-Hopf factor.
///
/// Fourier transform convention:
///   Ghat(t, xi) = (2 pi)^(-1/2) Integral e^{-i X xi} G(t, X) dX,
/// so Ghat(0+, xi) = (2 pi)^(-1/2) for the Dirac initial state. Ghat is
/// evaluated from the contour representation
///   Ghat(t, xi) = c0 Integral_{Im Y = -g1} (V(xi)/V(xi+Y)) t^{-2iY/(l-1)}
///                 Gamma(2iY/(l-1)) dY,     c0 = 1/(pi (l-1) sqrt(2 pi)),
/// whose residue at Y = 0 reproduces the initial value exactly; for t <= 1
/// the contour sits above the origin and the residue term (2 pi)^(-1/2) is
/// split off, which is the better-conditioned form as t -> 0.
class FundamentalSolution {
 public:
  explicit FundamentalSolution(const WienerHopfFactor& factor);

  const WienerHopfFactor& factor() const { return factor_; }

  GhatEvaluation eval_Ghat(double t, Complex xi, double tol = 1e-9) const;

  /// Shared-node evaluation for a batch of times at one xi (the t-dependence
  /// enters the integrand only through the t-power factor).
  std::vector<GhatEvaluation> eval_Ghat_batch(const std::vector<double>& ts,
                                              Complex xi,
                                              double tol = 1e-9) const;

  /// G(t, X) by Fourier inversion along Im xi = beta0. Real-valued up to the
  /// reported realness defect; a defect above 1e-5 relative signals a contour
  /// or branch error.
  struct GValue {
    double value = 0.0;
    double realness_defect = 0.0;  // |Im| / max(|Re|, tiny)
    bool by_parts = false;         // which inversion form was used
  };
  GValue eval_G(double t, double X, double tol = 1e-8) const;
  std::vector<GValue> eval_G_many(double t, const std::vector<double>& Xs,
                                  double tol = 1e-8) const;

  /// g(t, x, x0) = (1/x0) g(t x0^{(lambda-1)/2}, x/x0, 1) with
  /// g(t, x, 1) = G(t, ln x).
  double rescale_fundamental(double t, double x, double x0,
                             double tol = 1e-8) const;

  /// Small-time profile oracle: the limit of t^2 G(t, t^2 chi) computed by
  /// direct oscillatory quadrature of
  ///   (2 pi)^(-1) Integral e^{i eta chi} e^{-2 sqrt(pi i eta)} d eta
  /// over the real line (principal square root). Factor-independent.
  static double small_time_profile(double chi, double tol = 1e-10);

  /// Closed form chi^{-3/2} e^{-pi/chi} that the oracle integral reproduces
  /// (unit mass; vanishes for chi <= 0).
  static double small_time_profile_closed_form(double chi);

  /// Large-time profile:
  ///   Psi1(theta) = Re[ K Integral_{Im xi = b0} e^{i xi theta} V(xi)
  ///                     Gamma(2i(i - xi)/(lambda-1)) dxi ],
  /// K = i / (pi (lambda-1) V'(i)). In the self-similar regime
  /// G(t, X) ~ t^{2/(lambda-1)} Psi1(X + 2 ln(t)/(lambda-1)).
  double large_time_profile(double theta, double tol = 1e-9) const;

  /// Tail constants of Psi1: Psi1 ~ C1 e^{-3 theta/2} (theta -> -inf) and
  /// C2 e^{-(3+lambda) theta/2} (theta -> +inf), from the factor residues at
  /// 3i/2 and (3+lambda)i/2.
  double psi1_tail_constant_left() const;
  double psi1_tail_constant_right() const;

  /// Plateau fit of G e^{3X/2} (left) and G e^{(3+lambda)X/2} (right) for
  /// 0 < t <= 1; returns the two plateau coefficients. Throws when the fit
  /// residual exceeds 10%.
  std::pair<double, double> finite_time_tails(double t,
                                              double tol = 1e-8) const;

  /// Finite-time tail coefficient predicted for the right tail,
  /// G ~ coeff * t * e^{-(3+lambda)X/2}: coeff = V(2i)/(4 pi V((1+lambda/2)i)).
  double predicted_right_tail_coefficient() const;

  /// Rescaled phase of the Fourier-side integrand (used by the saddle-point
  /// diagnostics): Z -> log(V(xi)/V(xi + sqrt(|xi|) Z)) - z ln t - z
  /// + (z - 1/2) log z with z = 2 i sqrt(|xi|) Z / (lambda-1).
  Complex phase(double t, Complex xi, Complex Z) const;

  /// V'(i) used in the Psi1 normalization (exact at a simple zero, circle
  /// quadrature when the zero degenerates at special lambda).
  Complex v_prime_at_i() const;

  /// The inversion height used for real-space quadrature.
  double beta0() const { return beta0_; }

  /// Drop cached Ghat line tables (diagnostics / memory control).
  void clear_tables() const { tables_.clear(); }

 private:
  struct GhatTable {
    double t;
    double tol;
    double radius;
    bool eta_scaled = false;  // small-t tables sample Ghat(t, eta/t^2)
    ChebLineTable line;    // Ghat along the inversion line (or its rescaling)
    ChebLineTable d2line;  // second derivative fit (for the by-parts form)
  };
  const GhatTable& table_for(double t, double tol) const;
  double pick_gamma1(double im_xi) const;

  const WienerHopfFactor& factor_;
  double beta0_;
  std::vector<double> v_zero_ims_;    // zeros of V (poles of 1/V on lines)
  std::vector<double> phi_sing_ims_;  // Phi ladder heights
  mutable std::map<long long, double> gamma1_cache_;
  mutable std::map<std::pair<long long, long long>, GhatTable> tables_;
  mutable std::optional<Complex> v_prime_i_;
};

}  // namespace coag
