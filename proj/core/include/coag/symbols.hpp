#pragma once

#include <vector>

#include "coag/types.hpp"

namespace coag {

/// Catalogued zero or pole on the imaginary axis.
struct Singularity {
  enum class Kind { Zero, Pole };
  Kind kind;
  Complex location;  // purely imaginary
  int n = 0;         // family indices
  int k = 0;
  int order = 1;     // positive for zeros, magnitude of order for poles
};

struct SingularityCatalog {
  std::vector<Singularity> entries;  // sorted by Im(location)

  const Singularity* find(Complex at, double eps = 1e-9) const;
};

/// Mellin symbol M(s) = -2 sqrt(pi) Gamma(s) / Gamma(s - 1/2).
/// Zeros at s = 1/2 - n, poles at s = -n (n = 0, 1, ...).
Complex eval_M(Complex s);

/// Independent check of the closed form: M(s) as the Beta-type integral
/// -2 (s-1) * int_0^1 (1-theta)^(-1/2) theta^(s-2) dtheta, requiring
/// Re(s) > 1 for absolute convergence. Adjudicates the prefactor
/// (2 sqrt(pi), not 2 sqrt(2)) by direct quadrature.
Complex eval_M_integral_oracle(Complex s, double tol = 1e-12);

/// Two-term large-|s| expansion M(s) = -2 sqrt(pi s) (1 - 3/(8s)).
Complex eval_M_asymptotic(Complex s);

/// Shifted symbol Phi(xi) = -2 sqrt(pi) Gamma(i xi + 1 + lambda/2) /
/// Gamma(i xi + (lambda+1)/2) = M(i xi + 1 + lambda/2).
/// Zeros at i(n + (1+lambda)/2), poles at i(1 + lambda/2 + n).
Complex eval_Phi(Complex xi, const KernelParams& p);

/// Large-|Re xi| expansion of Phi with Q = sign(Re xi):
/// order 0:  -sqrt(2 pi) (1 + iQ) sqrt(Q xi)
/// order 1:  adds -(sqrt(2 pi)(1+iQ) i / xi) sqrt(Q xi) (1/8 + lambda/4).
Complex eval_Phi_asymptotic(Complex xi, const KernelParams& p, int order);

/// First `count` zeros and poles of Phi, merged and sorted by Im.
SingularityCatalog catalog_singularities(const KernelParams& p, int count);

/// Continuous-branch log(-Phi) along a horizontal contour sweep.
///
/// The tracker is anchored at the largest-Re end of the sweep, where
/// arg(-Phi) tends to +pi/4, and unwinds by continuity as eval() is called at
/// successive contour nodes moving left. A jump of more than pi/2 between
/// consecutive nodes reports insufficient resolution.
class BranchTracker {
 public:
  BranchTracker(const KernelParams& p, double anchor_re, double height);

  /// Evaluate log(-Phi) at xi = (re, height); nodes must be supplied in
  /// monotone order in `re` starting from the anchor.
  Complex eval(double re);

  double current_argument() const { return last_arg_; }
  long unwind_count() const { return unwinds_; }

 private:
  KernelParams params_;
  double height_;
  double last_re_;
  double last_arg_;
  bool primed_ = false;
  long unwinds_ = 0;
};

/// log(-Phi(xi)) with the branch normalized so that arg -> +pi/4 as
/// Re(xi) -> +infinity. On the construction window Im(xi) in
/// ((2+lambda)/2, (3+lambda)/2) the real part of -Phi is positive and the
/// principal branch already satisfies the anchor; this is verified by the
/// tracker-based tests.
Complex log_neg_Phi(Complex xi, const KernelParams& p);

}  // namespace coag
