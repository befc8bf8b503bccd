#include "coag/fundamental_solution.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "coag/complex_special.hpp"
#include "coag/quadrature.hpp"
#include "coag/symbols.hpp"

namespace coag {
namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGL8X[4] = {0.1834346424956498, 0.5255324099163290,
                             0.7966664774136267, 0.9602898564975363};
constexpr double kGL8W[4] = {0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

// Integral of exp(i X u) * f(u) over [a, b] for a panel-smooth f, splitting
// the panel so each chunk carries at most ~1.2 radians of phase.
template <class F>
Complex oscillatory_chunked(const F& f, double a, double b, double X) {
  const int chunks =
      std::max(1, static_cast<int>(std::ceil(std::abs(X) * (b - a) / 1.2)));
  Complex acc{0.0, 0.0};
  for (int c = 0; c < chunks; ++c) {
    const double ca = a + (b - a) * c / chunks;
    const double cb = a + (b - a) * (c + 1) / chunks;
    const double mid = 0.5 * (ca + cb), half = 0.5 * (cb - ca);
    Complex s{0.0, 0.0};
    for (int j = 0; j < 4; ++j) {
      const double up = mid + half * kGL8X[j];
      const double um = mid - half * kGL8X[j];
      s += kGL8W[j] * (std::exp(Complex{0.0, X * up}) * f(up) +
                       std::exp(Complex{0.0, X * um}) * f(um));
    }
    acc += half * s;
  }
  return acc;
}

double min_distance(double h, const std::vector<double>& bad) {
  double m = 1e300;
  for (double b : bad) m = std::min(m, std::abs(h - b));
  return m;
}

}  // namespace

FundamentalSolution::FundamentalSolution(const WienerHopfFactor& factor)
    : factor_(factor) {
  const KernelParams& p = factor_.params();
  // Catalogued structure reused by every evaluation: V singularities (their
  // zeros are poles of 1/V on shifted lines) and the Phi ladder heights.
  std::vector<double> bad;
  for (const auto& s : factor_.catalog_V_singularities(8).entries) {
    bad.push_back(s.location.imag());
    if (s.kind == coag::Singularity::Kind::Zero)
      v_zero_ims_.push_back(s.location.imag());
  }
  for (int n = 0; n <= 8; ++n) {
    phi_sing_ims_.push_back(0.5 * (1.0 + p.lambda) + n);
    phi_sing_ims_.push_back(1.0 + 0.5 * p.lambda + n);
  }
  // Inversion height: default 3/2 + (lambda-1)/4, nudged for clearance from
  // the purely imaginary singularities of V.
  double best = p.strip_lo() + 0.5 * p.shift();
  double best_c = min_distance(best, bad);
  for (int i = -6; i <= 6; ++i) {
    const double h = p.strip_lo() + (0.5 + 0.06 * i) * p.shift();
    if (h <= p.strip_lo() + 0.02 || h >= p.strip_hi() - 0.02) continue;
    const double c = min_distance(h, bad);
    if (c > best_c + 1e-12) {
      best = h;
      best_c = c;
    }
  }
  beta0_ = best;
}

double FundamentalSolution::pick_gamma1(double im_xi) const {
  const long long key = std::llround(im_xi * 1e9);
  if (auto it = gamma1_cache_.find(key); it != gamma1_cache_.end())
    return it->second;
  const KernelParams& p = factor_.params();
  const double d = p.shift();
  // Ladder heights im_xi +- g + j d must stay clear of the Phi singular
  // heights (where the per-point extension factors are evaluated) and of the
  // zeros of V (which are poles of 1/V on the shifted line).
  std::vector<double> bad = phi_sing_ims_;
  bad.insert(bad.end(), v_zero_ims_.begin(), v_zero_ims_.end());
  double best_g = 0.3 * d, best_score = -1.0;
  for (int i = 0; i <= 40; ++i) {
    const double g = (0.18 + 0.27 * i / 40.0) * d;
    double score = 1e300;
    for (int j = 0; j <= 3; ++j) {
      score = std::min(score, min_distance(im_xi + g + j * d, bad));
      score = std::min(score, min_distance(im_xi - g + j * d, bad));
    }
    if (score > best_score) {
      best_score = score;
      best_g = g;
    }
  }
  gamma1_cache_.emplace(key, best_g);
  return best_g;
}

std::vector<GhatEvaluation> FundamentalSolution::eval_Ghat_batch(
    const std::vector<double>& ts, Complex xi, double tol) const {
  const KernelParams& p = factor_.params();
  if (!(xi.imag() > p.strip_lo() && xi.imag() < p.strip_hi()))
    throw NumericsError("eval_Ghat: Im(xi) must lie in the analyticity strip");
  for (double t : ts)
    if (!(t > 0.0)) throw NumericsError("eval_Ghat: t must be positive");

  std::vector<GhatEvaluation> out(ts.size());
  for (auto& e : out) e.error_estimate = 0.0;

  // The contour sits above the origin for t <= 1 (with the residue term
  // 1/sqrt(2 pi) split off) and below it for t > 1; split the batch.
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < ts.size(); ++i)
    (ts[i] <= 1.0 ? small : large).push_back(i);

  const double c0 = 1.0 / (kPi * (p.lambda - 1.0) * kSqrtTwoPi);
  const double g1 = pick_gamma1(xi.imag());
  const double rate = 0.5 * kPi / (p.lambda - 1.0);
  const double T = std::max(
      6.0, truncation_for_exponential_tail(5.0, rate, 0.05 * tol / c0));

  // Two evaluation paths for the V-ratio in the integrand: a cached line
  // table of log V when the whole excursion fits in a moderate window, and a
  // localized combined Cauchy integral otherwise (cost independent of Re xi).
  const double need = std::abs(xi.real()) + T + 8.0;
  const bool line_path = need <= 160.0 ||
                         factor_.line_ready(xi.imag() + g1, need) ||
                         factor_.line_ready(xi.imag() - g1, need);
  const double line_range = 160.0;
  Complex lgv_xi{0.0, 0.0};
  if (line_path) {
    lgv_xi = factor_.log_V(xi);
  } else {
    // Warm the log(-Phi) cache on the contour heights the ratio integrals
    // will use once both endpoints are shifted into the canonical strip.
    const double d = p.shift();
    auto strip_height = [&](double h) {
      while (h <= factor_.beta1() - d + 1e-12) h += d;
      while (h >= factor_.beta1() - 1e-12) h -= d;
      return h;
    };
    const double h0 = strip_height(xi.imag());
    for (double hs : {xi.imag() - g1, xi.imag() + g1}) {
      const double beta = factor_.ratio_contour_height(h0, strip_height(hs));
      factor_.prepare_lphi_segment(xi.real() - T - 10.0, xi.real() + T + 10.0,
                                   beta);
    }
  }

  auto run = [&](const std::vector<std::size_t>& idx, double sign,
                 double offset) {
    if (idx.empty()) return;
    std::vector<double> lnt(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) lnt[k] = std::log(ts[idx[k]]);

    // Off the cached lines, fit the pieces of V(xi)/V(.) along the shifted
    // contour once per call: the in-strip log ratio (analytic in the real
    // coordinate) and the difference-equation factor product (fitted as a
    // value, since its log has branch jumps). Every quadrature node is then
    // a pair of table lookups instead of a Cauchy integral.
    std::optional<ChebLineTable> f0tab, qtab;
    Complex px{1.0, 0.0};
    Complex xc = xi;
    if (!line_path) {
      const double h_line = xi.imag() + sign * g1;
      int kx = 0, kl = 0;
      px = factor_.strip_shift_product(xi, &kx);
      xc = xi + Complex{0.0, kx * p.shift()};
      (void)factor_.strip_shift_product(Complex{xi.real(), h_line}, &kl);
      const double h_line_c = h_line + kl * p.shift();
      const double lo = xi.real() - T - 0.5, hi = xi.real() + T + 0.5;
      f0tab = ChebLineTable::build(
          [&](double sarc) {
            return factor_.log_V_ratio(Complex{sarc, h_line_c}, xc);
          },
          lo, hi, std::max(1e-11, 0.01 * tol), 16, 4000);
      int km = 0;
      const double qmid = std::abs(
          factor_.strip_shift_product(Complex{0.5 * (lo + hi), h_line}, &km));
      qtab = ChebLineTable::build(
          [&](double sarc) {
            int kk = 0;
            return factor_.strip_shift_product(Complex{sarc, h_line}, &kk);
          },
          lo, hi, 1e-12 * std::max(1.0, qmid), 16, 4000);
    }

    struct Node {
      Complex zfac;   // -z, multiplying ln t in the exponent
      Complex base;   // rho * Gamma(z)
    };
    auto node_at = [&](double u) -> Node {
      const Complex Y{u, sign * g1};
      const Complex z = 2.0 * kImag * Y / (p.lambda - 1.0);
      if (line_path) {
        const Complex lrho =
            lgv_xi - factor_.log_V_line(xi.imag() + sign * g1, xi.real() + u,
                                        line_range);
        return Node{-z, std::exp(lrho + log_gamma(z).as_complex())};
      }
      const double sarc = xi.real() + u;
      const Complex rho_strip = std::exp(-f0tab->eval(sarc) +
                                         log_gamma(z).as_complex());
      return Node{-z, rho_strip * px / qtab->eval(sarc)};
    };

    struct MPanel {
      double a, b;
      std::vector<Complex> val;
      double err;
    };
    auto eval_panel = [&](double a, double b) {
      // Gauss-Kronrod 7-15 with shared nodes across the batch.
      static const double nw[8][3] = {
          {0.000000000000000, 0.417959183673469, 0.209482141084728},
          {0.405845151377397, 0.381830050505119, 0.190350578064785},
          {0.741531185599394, 0.279705391489277, 0.140653259715525},
          {0.949107912342759, 0.129484966168870, 0.063092092629979},
          {0.207784955007898, 0.0, 0.204432940075298},
          {0.586087235467691, 0.0, 0.169004726639267},
          {0.864864423359769, 0.0, 0.104790010322250},
          {0.991455371120813, 0.0, 0.022935322010529}};
      MPanel out2{a, b, std::vector<Complex>(idx.size(), Complex{0, 0}), 0.0};
      std::vector<Complex> g7(idx.size(), Complex{0, 0});
      const double x0 = 0.5 * (a + b), m = 0.5 * (b - a);
      for (int j = 0; j < 8; ++j) {
        for (int s2 = (j == 0 ? 0 : -1); s2 <= 1; s2 += 2) {
          const double u = x0 + s2 * m * nw[j][0];
          const Node nd = node_at(u);
          for (std::size_t k = 0; k < idx.size(); ++k) {
            const Complex v = nd.base * std::exp(nd.zfac * lnt[k]);
            out2.val[k] += nw[j][2] * v;
            g7[k] += nw[j][1] * v;
          }
          if (j == 0) break;
        }
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        out2.val[k] *= m;
        out2.err += std::abs(out2.val[k] - m * g7[k]);
      }
      return out2;
    };

    std::vector<MPanel> heap;
    auto push = [&](MPanel pn) {
      heap.push_back(std::move(pn));
      std::push_heap(heap.begin(), heap.end(),
                     [](const MPanel& x, const MPanel& y) { return x.err < y.err; });
    };
    // Geometric seeding toward the tails, denser near the origin where the
    // Gamma factor has its nearby pole.
    std::vector<double> pts{-T, -T / 2, -T / 4, -T / 8, -2.0, -1.0, -0.5, -0.2,
                            0.0, 0.2, 0.5, 1.0, 2.0, T / 8, T / 4, T / 2, T};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Complex> totals(idx.size(), Complex{0, 0});
    double err = 0.0;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      MPanel pn = eval_panel(pts[i], pts[i + 1]);
      evals += 15;
      for (std::size_t k = 0; k < idx.size(); ++k) totals[k] += pn.val[k];
      err += pn.err;
      push(std::move(pn));
    }
    const double target = 0.5 * tol / c0 * static_cast<double>(idx.size());
    double best_err = err;
    int since_improvement = 0;
    while (err > target && evals < 60000 && !heap.empty()) {
      std::pop_heap(heap.begin(), heap.end(),
                    [](const MPanel& x, const MPanel& y) { return x.err < y.err; });
      MPanel worst = std::move(heap.back());
      heap.pop_back();
      const double mid = 0.5 * (worst.a + worst.b);
      if (mid <= worst.a || mid >= worst.b) {
        err -= worst.err;
        continue;
      }
      MPanel l = eval_panel(worst.a, mid), r = eval_panel(mid, worst.b);
      evals += 30;
      for (std::size_t k = 0; k < idx.size(); ++k)
        totals[k] += l.val[k] + r.val[k] - worst.val[k];
      err += l.err + r.err - worst.err;
      push(std::move(l));
      push(std::move(r));
      // stop once the estimate stagnates at the cancellation floor
      if (err < 0.98 * best_err) {
        best_err = err;
        since_improvement = 0;
      } else if (++since_improvement > 30) {
        break;
      }
    }
    // Tail bound from the exponential envelope of the integrand.
    const double tail =
        (std::abs(node_at(T).base) + std::abs(node_at(-T).base)) / rate;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& e = out[idx[k]];
      e.t = ts[idx[k]];
      e.xi = xi;
      e.value = Complex{offset, 0.0} + c0 * totals[k];
      e.error_estimate = c0 * (err / idx.size() + tail);
    }
  };

  // Saddle-window deformation: when |xi| t^2 is large the horizontal
  // contour computes an exponentially small answer by cancellation of O(1)
  // oscillations and bottoms out near 1e-12 absolute. Dipping the central
  // part of the contour through the stationary point of the rescaled phase
  // makes the integrand itself exponentially small there. Crossing Y = 0
  // contributes the 1/sqrt(2 pi) residue term; no other singularity lies in
  // the swept region as long as the dip stays clear of Re(xi + Y) = 0,
  // where the vertical ladders live.
  auto run_deformed = [&](const std::vector<std::size_t>& idx) {
    if (idx.empty()) return;
    std::vector<double> lnt(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) lnt[k] = std::log(ts[idx[k]]);

    const double tmax = *std::max_element(lnt.begin(), lnt.end());
    (void)tmax;
    const Complex zc = critical_point(xi, ts[idx[0]], p, 0.0).location;
    const Complex yc = std::sqrt(std::abs(xi)) * zc;
    const double ws = std::abs(yc.imag()) + 6.0;
    const double bx = yc.real() - ws, dx = yc.real() + ws;
    const double depth = yc.imag();  // negative
    // The horizontal tails must be cut where they are small compared to the
    // saddle value e^{-a sqrt(|xi|) t}, far deeper than the plain-path cut.
    const double t_min = *std::min_element(ts.begin(), ts.end());
    const double u_tail =
        (2.9 * std::sqrt(std::abs(xi)) * t_min + 10.0) / rate;
    const double Lx = std::max({T, std::abs(bx) + 2.0, u_tail});
    const double Rx = std::max({T, dx + 2.0, u_tail});

    auto node_at = [&](Complex Y) {
      const Complex z = 2.0 * kImag * Y / (p.lambda - 1.0);
      const Complex lrho = factor_.log_V_ratio(xi, xi + Y);
      return std::make_pair(-z, lrho + log_gamma(z).as_complex());
    };
    // piecewise-linear path through the saddle window, deformed from the
    // lower contour so that no pole is swept
    const Complex pts_path[6] = {
        Complex{-Lx, -g1},  Complex{bx, -g1}, Complex{bx, depth},
        Complex{dx, depth}, Complex{dx, -g1}, Complex{Rx, -g1}};
    std::vector<Complex> totals(idx.size(), Complex{0.0, 0.0});
    double err = 0.0;
    for (int seg = 0; seg + 1 < 6; ++seg) {
      const Complex a = pts_path[seg], b = pts_path[seg + 1];
      if (a == b) continue;
      const Complex dir = b - a;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double lt = lnt[k];
        auto f = [&](double sarc) {
          const Complex Y = a + sarc * dir;
          auto [zf, lbase] = node_at(Y);
          return std::exp(lbase + zf * lt) * dir;
        };
        auto r = integrate_real(f, 0.0, 1.0, 0.02 * tol / c0, 40000);
        totals[k] += r.value;
        err += r.error_estimate / idx.size();
      }
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& e = out[idx[k]];
      e.t = ts[idx[k]];
      e.xi = xi;
      e.value = c0 * totals[k];
      e.error_estimate = c0 * err;
    }
  };

  // Route: saddle window for deep evaluations at t <= 1 when it is clear of
  // the vertical ladders; plain horizontal contours otherwise.
  std::vector<std::size_t> deform, plain_small;
  for (std::size_t i : small) {
    const double t = ts[i];
    const Complex zc = critical_point(xi, t, p, 0.0).location;
    const double yc_extent =
        std::sqrt(std::abs(xi)) * std::abs(zc) + 10.0 + T;
    const bool deep = std::abs(xi) * t * t >= 100.0;
    if (deep && std::abs(xi.real()) > yc_extent + 20.0)
      deform.push_back(i);
    else
      plain_small.push_back(i);
  }
  for (std::size_t i : deform) run_deformed({i});
  // t <= 1: contour above the origin, residue term split off.
  run(plain_small, +1.0, 1.0 / kSqrtTwoPi);
  // t > 1: contour below the origin, the t-power factor is then damping.
  run(large, -1.0, 0.0);
  return out;
}

GhatEvaluation FundamentalSolution::eval_Ghat(double t, Complex xi,
                                              double tol) const {
  return eval_Ghat_batch({t}, xi, tol)[0];
}

const FundamentalSolution::GhatTable& FundamentalSolution::table_for(
    double t, double tol) const {
  const std::pair<long long, long long> key{
      static_cast<long long>(std::llround(std::log(t) * 1e9)),
      static_cast<long long>(std::llround(std::log(tol)))};
  auto it = tables_.find(key);
  if (it != tables_.end()) return it->second;

  GhatTable tab;
  tab.t = t;
  tab.tol = tol;
  if (t < 0.25) {
    // Rescaled line: Ghat(t, eta / t^2) along Im eta = beta0 t^2. The decay
    // in eta is self-similar (~ e^{-sqrt(2 pi |eta|)}), so a fixed radius
    // suffices for every small t.
    tab.eta_scaled = true;
    tab.radius = 165.0;
    const double t2 = t * t;
    tab.line = ChebLineTable::build(
        [&](double u) {
          return eval_Ghat(t, Complex{u / t2, beta0_}, 0.1 * tol).value;
        },
        -tab.radius, tab.radius, 0.3 * tol, 16, 40000);
  } else {
    tab.eta_scaled = false;
    const double scale0 =
        std::abs(eval_Ghat(t, Complex{0.0, beta0_}, tol).value);
    const double floor_val = 0.02 * tol * std::max(scale0, 1e-6);
    double R = 24.0;
    while (R < 3.0e5) {
      const double a1 = std::abs(eval_Ghat(t, Complex{R, beta0_}, tol).value);
      const double a2 = std::abs(eval_Ghat(t, Complex{-R, beta0_}, tol).value);
      if (std::max(a1, a2) < floor_val) break;
      R *= 1.5;
    }
    tab.radius = R;
    // Warm the log V line caches once so the sweep below stays on the cheap
    // table path for every node.
    const double g1w = pick_gamma1(beta0_);
    const double ratew = 0.5 * kPi / (factor_.params().lambda - 1.0);
    const double Tyw = std::max(
        6.0, truncation_for_exponential_tail(
                 5.0, ratew,
                 0.005 * tol * kPi * (factor_.params().lambda - 1.0) *
                     kSqrtTwoPi));
    factor_.warm_line(beta0_ + g1w, R + Tyw + 10.0);
    factor_.warm_line(beta0_ - g1w, R + Tyw + 10.0);
    tab.line = ChebLineTable::build(
        [&](double u) {
          return eval_Ghat(t, Complex{u, beta0_}, 0.1 * tol).value;
        },
        -R, R, 0.3 * tol * std::max(scale0, 1e-3), 16, 40000);
    tab.d2line = tab.line.derivative().derivative();
  }
  return tables_.emplace(key, std::move(tab)).first->second;
}

FundamentalSolution::GValue FundamentalSolution::eval_G(double t, double X,
                                                        double tol) const {
  return eval_G_many(t, {X}, tol)[0];
}

std::vector<FundamentalSolution::GValue> FundamentalSolution::eval_G_many(
    double t, const std::vector<double>& Xs, double tol) const {
  const GhatTable& tab = table_for(t, tol);
  std::vector<GValue> out;
  out.reserve(Xs.size());
  for (double X : Xs) {
    GValue g;
    if (tab.eta_scaled) {
      // G(t, X) = e^{-beta0 X} / (sqrt(2 pi) t^2) Integral e^{i u X/t^2}
      //           Ghat(t, (u + i beta0 t^2)/t^2) du.
      const double chi = X / (t * t);
      Complex I{0.0, 0.0};
      for (const auto& pn : tab.line.panels()) {
        auto f = [&](double u) {
          const double uu = std::clamp(2.0 * (u - pn.a) / (pn.b - pn.a) - 1.0,
                                       -1.0, 1.0);
          Complex y1{0, 0}, y2{0, 0};
          for (int k = static_cast<int>(pn.coef.size()) - 1; k >= 1; --k) {
            const Complex y = 2.0 * uu * y1 - y2 + pn.coef[k];
            y2 = y1;
            y1 = y;
          }
          return uu * y1 - y2 + pn.coef[0];
        };
        I += oscillatory_chunked(f, pn.a, pn.b, chi);
      }
      const Complex Gc = I * std::exp(-beta0_ * X) / (kSqrtTwoPi * t * t);
      g.value = Gc.real();
      g.realness_defect =
          std::abs(Gc.imag()) / std::max(std::abs(Gc.real()), 1e-300);
      out.push_back(g);
      continue;
    }
    g.by_parts = std::abs(X) >= 1e-3 && std::abs(X) < 0.1;
    Complex I{0.0, 0.0};
    if (!g.by_parts) {
      // (2 pi)^(-1/2) Integral e^{i X xi} Ghat dxi along Im xi = beta0.
      for (const auto& pn : tab.line.panels()) {
        auto f = [&](double u) {
          const double uu = std::clamp(2.0 * (u - pn.a) / (pn.b - pn.a) - 1.0,
                                       -1.0, 1.0);
          Complex y1{0, 0}, y2{0, 0};
          for (int k = static_cast<int>(pn.coef.size()) - 1; k >= 1; --k) {
            const Complex y = 2.0 * uu * y1 - y2 + pn.coef[k];
            y2 = y1;
            y1 = y;
          }
          return uu * y1 - y2 + pn.coef[0];
        };
        I += oscillatory_chunked(f, pn.a, pn.b, X);
      }
      I *= std::exp(-X * beta0_);
    } else {
      // Twice-integrated-by-parts form, preferable for small |X|:
      // G = -(2 pi)^(-1/2) X^{-2} Integral (e^{i X xi} - 1) Ghat'' dxi.
      for (const auto& pn : tab.d2line.panels()) {
        auto f = [&](double u) {
          const double uu = std::clamp(2.0 * (u - pn.a) / (pn.b - pn.a) - 1.0,
                                       -1.0, 1.0);
          Complex y1{0, 0}, y2{0, 0};
          for (int k = static_cast<int>(pn.coef.size()) - 1; k >= 1; --k) {
            const Complex y = 2.0 * uu * y1 - y2 + pn.coef[k];
            y2 = y1;
            y1 = y;
          }
          return uu * y1 - y2 + pn.coef[0];
        };
        // (e^{i X (u + i beta0)} - 1) f(u): split into the oscillatory part
        // and the plain part.
        I += std::exp(-X * beta0_) * oscillatory_chunked(f, pn.a, pn.b, X);
        I -= integrate_real(f, pn.a, pn.b, 0.05 * tol, 4000).value;
      }
      I *= -1.0 / (X * X);
    }
    const Complex Gc = I / kSqrtTwoPi;
    g.value = Gc.real();
    g.realness_defect = std::abs(Gc.imag()) / std::max(std::abs(Gc.real()), 1e-300);
    out.push_back(g);
  }
  return out;
}

double FundamentalSolution::rescale_fundamental(double t, double x, double x0,
                                                double tol) const {
  if (!(x > 0.0) || !(x0 > 0.0))
    throw NumericsError("rescale_fundamental: x and x0 must be positive");
  const double lam = factor_.params().lambda;
  const double ts = t * std::pow(x0, 0.5 * (lam - 1.0));
  return eval_G(ts, std::log(x / x0), tol).value / x0;
}

double FundamentalSolution::small_time_profile(double chi, double tol) {
  // (2 pi)^(-1) Integral over the real line of e^{i eta chi} e^{-2 sqrt(pi i eta)},
  // principal square root; the two half-lines are conjugate, so take twice the
  // real part of the eta > 0 half and substitute eta = s^2.
  const double root_rate = kSqrtTwoPi;  // modulus decay e^{-sqrt(2 pi) s}
  const double T = std::max(4.0, std::log(20.0 / tol) / root_rate);
  const Complex c = 2.0 * kSqrtPi * std::exp(Complex{0.0, 0.25 * kPi});
  auto f = [&](double s) {
    return std::exp(Complex{0.0, s * s * chi} - c * s) * (2.0 * s);
  };
  auto r = integrate_real(f, 0.0, T, 0.25 * tol, 2000000);
  return r.value.real() / kPi;
}

double FundamentalSolution::small_time_profile_closed_form(double chi) {
  if (chi <= 0.0) return 0.0;
  return std::exp(-kPi / chi) / (chi * std::sqrt(chi));
}

Complex FundamentalSolution::v_prime_at_i() const {
  if (!v_prime_i_) {
    const VValue v = factor_.extend_V(Complex{0.0, 1.0});
    if (v.order == 1) {
      v_prime_i_ = std::exp(v.log_reg);
    } else {
      // Degenerate lambda (the zero at i is cancelled by a pole ladder
      // collision): fall back to circle quadrature of the analytic V.
      v_prime_i_ = factor_.derivative_V(Complex{0.0, 1.0}, 0.1);
    }
  }
  return *v_prime_i_;
}

double FundamentalSolution::large_time_profile(double theta, double tol) const {
  const KernelParams& p = factor_.params();
  const Complex K =
      kImag / (kPi * (p.lambda - 1.0) * v_prime_at_i());
  const double rate = 1.5 * kPi / (p.lambda - 1.0);
  const double T =
      std::max(4.0, truncation_for_exponential_tail(10.0, rate, 0.05 * tol));
  HorizontalContour c;
  c.height = beta0_;
  c.half_length = T;
  c.anchors = {0.0};
  auto f = [&](Complex xi) {
    const Complex z = 2.0 * kImag * (kImag - xi) / (p.lambda - 1.0);
    return std::exp(factor_.log_V_line(beta0_, xi.real()) +
                    kImag * xi * theta + log_gamma(z).as_complex());
  };
  auto r = integrate_line(f, c, 0.3 * tol);
  return (K * r.value).real();
}

double FundamentalSolution::psi1_tail_constant_left() const {
  const KernelParams& p = factor_.params();
  const Complex K = kImag / (kPi * (p.lambda - 1.0) * v_prime_at_i());
  const Complex res = factor_.residue_V(Complex{0.0, 1.5});
  const Complex g = gamma(Complex{1.0 / (p.lambda - 1.0), 0.0});
  return (K * kTwoPi * kImag * res * g).real();
}

double FundamentalSolution::psi1_tail_constant_right() const {
  const KernelParams& p = factor_.params();
  const Complex K = kImag / (kPi * (p.lambda - 1.0) * v_prime_at_i());
  const Complex res = factor_.residue_V(Complex{0.0, 0.5 * (3.0 + p.lambda)});
  const Complex g = gamma(Complex{(1.0 + p.lambda) / (p.lambda - 1.0), 0.0});
  return (K * kTwoPi * kImag * res * g).real();
}

std::pair<double, double> FundamentalSolution::finite_time_tails(
    double t, double tol) const {
  if (!(t > 0.0 && t <= 1.0))
    throw NumericsError("finite_time_tails: requires 0 < t <= 1");
  const double lam = factor_.params().lambda;
  auto plateau = [&](double xlo, double xhi, double expo) {
    std::vector<double> xs;
    for (int i = 0; i < 10; ++i) xs.push_back(xlo + (xhi - xlo) * i / 9.0);
    auto gs = eval_G_many(t, xs, tol);
    double mean = 0.0;
    std::vector<double> cs;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cs.push_back(gs[i].value * std::exp(expo * xs[i]));
      mean += cs.back();
    }
    mean /= cs.size();
    double dev = 0.0;
    for (double cv : cs) dev = std::max(dev, std::abs(cv - mean));
    if (!(dev <= 0.10 * std::abs(mean)))
      throw NumericsError("finite_time_tails: no plateau (residual above 10%)");
    return mean;
  };
  const double left = plateau(-8.0, -5.0, 1.5);
  const double right = plateau(5.0, 8.0, 0.5 * (3.0 + lam));
  return {left, right};
}

double FundamentalSolution::predicted_right_tail_coefficient() const {
  const double lam = factor_.params().lambda;
  const Complex v2i = factor_.eval_V(Complex{0.0, 2.0});
  const Complex vp = factor_.eval_V(Complex{0.0, 1.0 + 0.5 * lam});
  return (v2i / (4.0 * kPi * vp)).real();
}

Complex FundamentalSolution::phase(double t, Complex xi, Complex Z) const {
  const double lam = factor_.params().lambda;
  const Complex Y = std::sqrt(std::abs(xi)) * Z;
  const Complex z = 2.0 * kImag * Y / (lam - 1.0);
  return factor_.log_V_ratio(xi, xi + Y) - z * std::log(t) - z +
         (z - 0.5) * std::log(z);
}

}  // namespace coag
