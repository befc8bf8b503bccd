#include "coag/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "coag/cheb.hpp"

namespace coag {
namespace {

// Gauss-Kronrod 7-15 nodes on [0,1] of the positive half, paired weights.
// nw[i] = {abscissa, gauss7 weight, kronrod15 weight}.
constexpr double kNW[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529}};

struct Panel {
  double a, b;
  Complex value;
  double err;
};

struct PanelCmp {
  bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

Panel gk15(const std::function<Complex(double)>& f, double a, double b) {
  const double x0 = 0.5 * (a + b);
  const double m = 0.5 * (b - a);
  Complex y0 = f(x0);
  Complex g7 = kNW[0][1] * y0;
  Complex k15 = kNW[0][2] * y0;
  for (int i = 1; i < 8; ++i) {
    const double dx = m * kNW[i][0];
    const Complex yi = f(x0 + dx) + f(x0 - dx);
    g7 += kNW[i][1] * yi;
    k15 += kNW[i][2] * yi;
  }
  g7 *= m;
  k15 *= m;
  return Panel{a, b, k15, std::abs(k15 - g7)};
}

IntegralResult adapt(const std::function<Complex(double)>& f,
                     std::vector<std::pair<double, double>> seed, double tol,
                     int node_budget) {
  std::priority_queue<Panel, std::vector<Panel>, PanelCmp> heap;
  Complex total{0.0, 0.0};
  double err = 0.0;
  long evals = 0;
  for (auto& [a, b] : seed) {
    Panel p = gk15(f, a, b);
    evals += 15;
    total += p.value;
    err += p.err;
    heap.push(p);
  }
  // Refine the worst panel until the tolerance is met, the budget runs out,
  // or the estimate stagnates at the roundoff floor (further splitting only
  // adds noise there).
  double best_err = err;
  int since_improvement = 0;
  while (err > tol && evals + 30 <= node_budget && !heap.empty()) {
    Panel worst = heap.top();
    if (worst.err <= 0.0) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval at roundoff floor
      err -= worst.err;
      continue;
    }
    Panel l = gk15(f, worst.a, mid);
    Panel r = gk15(f, mid, worst.b);
    evals += 30;
    total += l.value + r.value - worst.value;
    err += l.err + r.err - worst.err;
    heap.push(l);
    heap.push(r);
    if (err < 0.98 * best_err) {
      best_err = err;
      since_improvement = 0;
    } else if (++since_improvement > 40) {
      break;
    }
  }
  return IntegralResult{total, err, evals, err <= tol};
}

std::vector<std::pair<double, double>> seed_panels(double lo, double hi,
                                                   std::vector<double> anchors) {
  // Geometric panelization toward both endpoints, unit-ish panels in the
  // middle, plus forced breakpoints at the anchors.
  std::vector<double> pts{lo, hi};
  const double span = hi - lo;
  for (double w = span; w > 1e-3 * span && w > 1e-12; w *= 0.5) {
    pts.push_back(lo + w);
    pts.push_back(hi - w);
    if (pts.size() > 160) break;
  }
  const double mid = 0.5 * (lo + hi);
  const int nmid = 8;
  for (int i = 1; i < nmid; ++i)
    pts.push_back(mid + (i - nmid / 2) * span / (4.0 * nmid));
  for (double a : anchors)
    if (a > lo && a < hi) {
      pts.push_back(a);
      pts.push_back(std::min(hi, a + 0.02 * span));
      pts.push_back(std::max(lo, a - 0.02 * span));
    }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double x, double y) {
                          return std::abs(x - y) < 1e-14 * (1.0 + std::abs(x));
                        }),
            pts.end());
  std::vector<std::pair<double, double>> seed;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    seed.emplace_back(pts[i], pts[i + 1]);
  return seed;
}

}  // namespace

IntegralResult integrate_real(const std::function<Complex(double)>& f, double a,
                              double b, double tol, int node_budget) {
  if (!(b > a)) throw NumericsError("integrate_real: empty interval");
  return adapt(f, seed_panels(a, b, {}), tol, node_budget);
}

IntegralResult integrate_line(const ComplexIntegrand& f,
                              const HorizontalContour& c, double tol) {
  if (!(c.half_length > 0.0))
    throw NumericsError("integrate_line: half_length must be positive");
  const double lo = c.center - c.half_length;
  const double hi = c.center + c.half_length;
  auto g = [&](double u) { return f(Complex{u, c.height}); };
  return adapt(g, seed_panels(lo, hi, c.anchors), tol, c.node_budget);
}

double truncation_for_exponential_tail(double coef, double rate,
                                       double tail_bound) {
  if (!(rate > 0.0) || !(tail_bound > 0.0))
    throw NumericsError("truncation_for_exponential_tail: bad envelope");
  if (coef <= 0.0) return 1.0;
  // integral of coef*exp(-rate*u) du from T to infinity = coef/rate exp(-rate T)
  const double T = std::log(coef / (rate * tail_bound)) / rate;
  return std::max(1.0, T);
}

Complex residue_circle(const ComplexIntegrand& f, Complex at, double radius,
                       int nodes) {
  // (1/2 pi i) closed integral of f = trapezoid over the circle; doubling the
  // node count until two successive counts agree.
  auto once = [&](int n) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      const double th = kTwoPi * k / n;
      const Complex w = radius * std::exp(Complex{0.0, th});
      acc += f(at + w) * w;  // f * (z - at), absorbing dz/(2 pi i) = w dth/(2 pi)
    }
    return acc / static_cast<double>(n);
  };
  Complex prev = once(nodes);
  for (int n = 2 * nodes; n <= 16 * nodes; n *= 2) {
    const Complex cur = once(n);
    if (std::abs(cur - prev) <= 1e-12 * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

ShiftRecord shift_line(const ComplexIntegrand& f, const HorizontalContour& from,
                       double to_height, const std::vector<Complex>& between,
                       double tol) {
  ShiftRecord rec;
  rec.from_height = from.height;
  rec.to_height = to_height;

  const double lo = std::min(from.height, to_height);
  const double hi = std::max(from.height, to_height);
  double min_gap = hi - lo;
  for (const Complex& s : between) {
    if (!(s.imag() > lo && s.imag() < hi))
      throw NumericsError("shift_line: singularity not strictly between heights");
    min_gap = std::min({min_gap, s.imag() - lo, hi - s.imag()});
    for (const Complex& u : between)
      if (&u != &s) min_gap = std::min(min_gap, 0.5 * std::abs(u - s));
  }
  const double orient = to_height > from.height ? 1.0 : -1.0;
  for (const Complex& s : between) {
    const double r = 0.45 * min_gap;
    const Complex res = residue_circle(f, s, r);
    rec.crossed.push_back({s, res, orient * kTwoPi * kImag * res});
  }

  rec.integral_from = integrate_line(f, from, tol).value;
  HorizontalContour to = from;
  to.height = to_height;
  for (const Complex& s : between) to.anchors.push_back(s.real());
  rec.integral_to = integrate_line(f, to, tol).value;

  Complex sum{0.0, 0.0};
  for (const auto& x : rec.crossed) sum += x.contribution;
  rec.identity_residual = std::abs(rec.integral_from - rec.integral_to - sum);
  rec.identity_ok = rec.identity_residual <= 2.0 * tol;
  return rec;
}

CriticalPoint critical_point(Complex xi, double t, const KernelParams& p,
                             double threshold,
                             const std::function<Complex(Complex)>& phase_dZ) {
  CriticalPoint cp;
  cp.scale = std::sqrt(std::abs(xi)) * t;
  cp.validity = std::abs(xi) * t * t >= threshold;
  const double q = xi.real() >= 0.0 ? 1.0 : -1.0;
  Complex zc = (p.lambda - 1.0) * kSqrtTwoPi * t * Complex{1.0, q} /
               (2.0 * kImag);
  if (cp.validity && phase_dZ) {
    // One Newton step with a finite-difference second derivative.
    const double h = 1e-4 * std::abs(zc);
    const Complex d1 = phase_dZ(zc);
    const Complex d2 =
        (phase_dZ(zc + h) - phase_dZ(zc - h)) / (2.0 * h);
    if (std::abs(d2) > 0.0) {
      const Complex step = d1 / d2;
      if (std::abs(step) < 0.3 * std::abs(zc)) zc -= step;
    }
  }
  cp.location = zc;
  return cp;
}

}  // namespace coag
