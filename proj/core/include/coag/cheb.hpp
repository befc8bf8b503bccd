#pragma once

#include <functional>
#include <vector>

#include "coag/types.hpp"

namespace coag {

/// Piecewise Chebyshev interpolant of a smooth complex-valued function on a
/// real interval. Panels are bisected adaptively until the trailing Chebyshev
/// coefficients fall below the requested absolute tolerance.
class ChebLineTable {
 public:
  ChebLineTable() = default;

  static ChebLineTable build(const std::function<Complex(double)>& f, double a,
                             double b, double tol_abs, int degree = 16,
                             int max_panels = 20000);

  Complex eval(double x) const;
  bool covers(double x) const { return !panels_.empty() && x >= a_ && x <= b_; }
  double lo() const { return a_; }
  double hi() const { return b_; }
  std::size_t panel_count() const { return panels_.size(); }

  struct Panel {
    double a, b;
    std::vector<Complex> coef;  // Chebyshev coefficients on [a,b]
  };
  const std::vector<Panel>& panels() const { return panels_; }

  /// Differentiated copy (Chebyshev derivative panel by panel).
  ChebLineTable derivative() const;

 private:
  double a_ = 0.0, b_ = 0.0;
  std::vector<Panel> panels_;  // sorted by a
};

}  // namespace coag
