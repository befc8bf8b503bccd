#pragma once

#include <functional>
#include <string>
#include <vector>

#include "coag/types.hpp"

namespace coag {

/// Sampled function on a logarithmically uniform grid in x.
struct GridFunction {
  std::vector<double> x;       // strictly increasing, log-spaced
  std::vector<double> values;  // g(x_i)
  double x_min = 0.0, x_max = 0.0;
  double dX = 0.0;  // uniform spacing of ln x

  static GridFunction log_grid(double x_min, double x_max, int nodes);

  std::size_t size() const { return x.size(); }

  /// Cubic (4-point Lagrange in ln x) interpolation; power-law extrapolation
  /// beyond the grid using the fitted boundary slopes.
  double interp(double xq) const;

  /// Fitted log-log slope near the right (last nodes) or left boundary.
  double right_slope() const;
  double left_slope() const;
};

struct SolverConfig {
  double dt = 0.0;  // <= 0: determined by a runtime stability probe
  double t_end = 0.5;
  enum class Scheme { Explicit, SemiImplicit };
  Scheme scheme = Scheme::Explicit;
  double delta_width_cells = 4.0;  // mollifier width for delta data
  /// Tail closure for the integrals beyond x_max: "power_law" imposes the
  /// stationary decay x^{-(3+lambda)/2}, "fitted" uses the boundary slope,
  /// "none" truncates.
  std::string cutoff_policy = "power_law";
  std::vector<double> checkpoints;  // times at which states are recorded
  double blowup_guard = 1e12;
};

struct ApplyLOptions {
  std::string cutoff_policy = "power_law";
  /// Width of the locally Taylor-expanded part of the singular difference
  /// integral, in units of x * dX.
  double inner_cells = 4.0;
};

/// The linearized coagulation operator around the stationary power law
/// x^{-(3+lambda)/2}:
///   L(g)(x) = int_0^{x/2} [(x-y)^{l/2} G0(x-y) - x^{l/2} G0(x)] y^{l/2} g(y) dy
///           + int_0^{x/2} [(x-y)^{l/2} g(x-y) - x^{l/2} g(x)] y^{-3/2} dy
///           - x^{-3/2} int_{x/2}^inf y^{l/2} g(y) dy
///           - 2 sqrt(2) x^{(l-1)/2} g(x),
/// with G0(u) = u^{-(3+lambda)/2}, discretized on the log grid. The singular
/// second integral is split at y = inner_cells * x * dX with the inner part
/// integrated from a second-order Taylor expansion.
GridFunction apply_L(const GridFunction& g, const KernelParams& p,
                     const ApplyLOptions& opt = {});

struct Trajectory {
  std::vector<double> times;
  std::vector<GridFunction> states;
  std::vector<double> masses;
  double dt_used = 0.0;
  double operator_norm_estimate = 0.0;  // measured stability bound
  long steps = 0;
};

Trajectory evolve(const GridFunction& g0, const SolverConfig& cfg,
                  const KernelParams& p);

/// Total x-weighted integral (mass) with the tail closure of the policy.
double mass(const GridFunction& g, const std::string& cutoff_policy = "power_law");

/// Mass restricted to [x_min, R] (no tail closure).
double mass_below(const GridFunction& g, double R);

/// Log-normal bump of the given width (in grid cells), normalized to unit
/// x-mass on the grid.
GridFunction mollified_delta(const GridFunction& grid_template, double x0,
                             double width_cells);

}  // namespace coag
