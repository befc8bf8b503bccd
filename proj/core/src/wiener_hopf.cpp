#include "coag/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "coag/complex_special.hpp"
#include "coag/quadrature.hpp"

#include "json.hpp"

namespace coag {
namespace {

// Stable 1 / (1 - exp(z)).
Complex inv_one_minus_exp(Complex z) {
  if (z.real() > 0.0) {
    const Complex t = std::exp(-z);
    return -t / (1.0 - t);
  }
  const Complex t = std::exp(z);
  return 1.0 / (1.0 - t);
}

// Stable 1 / (1 + exp(-z)).
Complex logistic(Complex z) {
  if (z.real() > 0.0) return 1.0 / (1.0 + std::exp(-z));
  const Complex t = std::exp(z);
  return t / (1.0 + t);
}

double quantize_key_part(double v) { return std::round(v * 1e6); }

long long cache_key(Complex xi) {
  const double qre = quantize_key_part(xi.real());
  const double qim = quantize_key_part(xi.imag() - 1.0);
  if (std::abs(qre) >= 5.4e11 || qim < 0.0 || qim >= 2.0e6) return -1;
  const long long re_off = static_cast<long long>(qre) + (1LL << 39);
  return (static_cast<long long>(qim) << 41) | re_off;
}

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

// Derivative of Phi at its n-th zero i(n + (1+lambda)/2), from the Gamma-ratio
// structure: Phi'(z_n) = -2 sqrt(pi) i (-1)^n n! Gamma(1/2 - n).
Complex phi_derivative_at_zero(int n) {
  double fact = 1.0;
  for (int j = 2; j <= n; ++j) fact *= j;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const Complex g = gamma(Complex{0.5 - n, 0.0});
  return -2.0 * kSqrtPi * kImag * sign * fact * g;
}

// Residue of Phi at its n-th pole i(1 + lambda/2 + n):
// Res = 2 sqrt(pi) i (-1)^n / (n! Gamma(-n - 1/2)).
Complex phi_residue_at_pole(int n) {
  double fact = 1.0;
  for (int j = 2; j <= n; ++j) fact *= j;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const Complex g = gamma(Complex{-n - 0.5, 0.0});
  return 2.0 * kSqrtPi * kImag * sign / (fact * g);
}

}  // namespace

WienerHopfFactor::WienerHopfFactor(KernelParams p, std::optional<double> beta1,
                                   double tol)
    : params_(p), tol_(tol) {
  const double win_lo = 0.5 * (2.0 + p.lambda);
  const double win_hi = 0.5 * (3.0 + p.lambda);
  if (!beta1) {
    // Slightly off the window midpoint: the midpoint lands exactly on the
    // quarter-integer evaluation lattice for lambda = 3/2 (the contour would
    // pass through 2i and similar points), and the contour must also clear
    // the regularizer poles at odd multiples of (lambda-1)/4. Score a few
    // candidates by their worst clearance.
    const double d = p.shift();
    std::vector<double> hazards;
    for (double b = 0.25 * d; b < win_hi + d; b += 0.5 * d) hazards.push_back(b);
    for (double base : {2.0, 1.0 + 0.5 * p.lambda, 1.5, 0.5 * (3.0 + p.lambda),
                        1.0 + p.lambda, 0.5 * (1.0 + p.lambda)})
      for (int k = -6; k <= 6; ++k) hazards.push_back(base + k * d);
    double best = 0.0, best_c = -1.0;
    for (int i = -8; i <= 8; ++i) {
      const double cand =
          0.5 * (win_lo + win_hi) + (0.53 + 0.05 * i) * 0.25 * (win_hi - win_lo);
      if (cand <= win_lo + 0.04 * d || cand >= win_hi - 0.04 * d) continue;
      double c = 1e300;
      for (double h : hazards)
        c = std::min(c, std::min(std::abs(cand - h), std::abs(cand - d - h)));
      if (c > best_c) {
        best_c = c;
        best = cand;
      }
    }
    beta1_ = best;
  } else {
    beta1_ = *beta1;
  }
  if (!(beta1_ > win_lo && beta1_ < win_hi))
    throw NumericsError(
        "WienerHopfFactor: construction height must lie in ((2+lambda)/2, (3+lambda)/2)");
  phi_catalog_ = catalog_singularities(params_, 64);

  // The construction branch of log(-Phi) is the principal one; on the whole
  // window Re(-Phi) > 0, which pins arg -> pi/4 at Re -> +infinity. Checked
  // here on a coarse scan so a bad height fails early.
  for (double re : {-1e4, -512.0, -33.0, -2.1, -0.13, 0.0, 0.17, 3.7, 41.0,
                    511.0, 1e4}) {
    const Complex mphi = -eval_Phi(Complex{re, beta1_}, params_);
    if (!(mphi.real() > 0.0))
      throw NumericsError("WienerHopfFactor: Re(-Phi) <= 0 on the construction line");
  }

  lphi_height_ = beta1_;
  lphi_line_ = ChebLineTable::build(
      [this](double re) {
        return std::log(-eval_Phi(Complex{re, lphi_height_}, params_));
      },
      -64.0, 64.0, 1e-13);
}

bool WienerHopfFactor::in_strip(Complex xi, double beta, double margin) const {
  const double d = params_.shift();
  return xi.imag() > beta - d + margin && xi.imag() < beta - margin;
}

Complex WienerHopfFactor::log_neg_phi_cached(double re, double beta) const {
  if (std::abs(beta - lphi_height_) < 1e-12 && std::abs(re) <= 64.0)
    return lphi_line_.eval(re);
  for (const auto& seg : lphi_segments_)
    if (std::abs(seg.beta - beta) < 1e-12 && seg.tab.covers(re))
      return seg.tab.eval(re);
  return std::log(-eval_Phi(Complex{re, beta}, params_));
}

void WienerHopfFactor::prepare_lphi_segment(double lo, double hi,
                                            std::optional<double> beta) const {
  if (!(hi > lo)) return;
  const double b = beta.value_or(lphi_height_);
  if (std::abs(b - lphi_height_) < 1e-12 && lo >= -64.0 && hi <= 64.0) return;
  for (const auto& seg : lphi_segments_)
    if (std::abs(seg.beta - b) < 1e-12 && seg.tab.lo() <= lo &&
        seg.tab.hi() >= hi)
      return;
  lphi_segments_.push_back(
      {b, ChebLineTable::build(
              [this, b](double re) {
                return std::log(-eval_Phi(Complex{re, b}, params_));
              },
              lo - 4.0, hi + 4.0, 3e-12)});
  if (lphi_segments_.size() > 64) lphi_segments_.erase(lphi_segments_.begin());
}

double WienerHopfFactor::ratio_contour_height(double im_xi, double im_y) const {
  // Midpoint of the gap between the two pole ladders intersected with the
  // admissible window; NaN when the gap is too thin to integrate across.
  const double d = params_.shift();
  const double win_lo = 0.5 * (2.0 + params_.lambda);
  const double win_hi = 0.5 * (3.0 + params_.lambda);
  const double lo = std::max({im_xi, im_y, win_lo});
  const double hi = std::min({std::min(im_xi, im_y) + d, win_hi});
  if (!(hi - lo > 0.04 * d)) return std::numeric_limits<double>::quiet_NaN();
  return 0.5 * (lo + hi);
}

Complex WienerHopfFactor::strip_shift_factors(Complex xi, int* k_out) const {
  const double d = params_.shift();
  const double s_lo = beta1_ - d;
  const double s_hi = beta1_;
  Complex sum{0.0, 0.0};
  int k = 0;
  double h = xi.imag();
  while (h <= s_lo + 1e-12) {
    h += d;
    ++k;
    sum += std::log(-eval_Phi(Complex{xi.real(), h}, params_));
  }
  while (h >= s_hi - 1e-12) {
    sum -= std::log(-eval_Phi(Complex{xi.real(), h}, params_));
    h -= d;
    --k;
  }
  if (h <= s_lo + 1e-12)
    throw NumericsError("strip_shift_factors: height aligns with the contour lattice");
  *k_out = k;
  return sum;
}

Complex WienerHopfFactor::cauchy_log_V(Complex xi, double beta) const {
  const double kap = params_.kappa();
  const double tolq = 0.25 * tol_ * (params_.lambda - 1.0);
  const double pad = std::max(1.5, (-std::log(tolq) + 6.0) / kap + 0.5);
  const double lo = std::min(0.0, xi.real()) - pad;
  const double hi = std::max(0.0, xi.real()) + pad;

  HorizontalContour c;
  c.height = beta;
  c.center = 0.5 * (lo + hi);
  c.half_length = 0.5 * (hi - lo);
  c.anchors = {0.0, xi.real()};
  c.node_budget = 600000;

  auto f = [&](Complex eta) {
    const Complex lphi = log_neg_phi_cached(eta.real(), beta);
    const Complex b1 = inv_one_minus_exp(kap * (xi - eta));
    const Complex b2 = logistic(kap * eta);
    return lphi * (b1 - b2);
  };
  const double tol_here = tolq * std::max(1.0, 0.02 * (hi - lo));
  auto r = integrate_line(f, c, tol_here);
  if (!r.converged && r.error_estimate > 50.0 * tol_here)
    throw NumericsError("WienerHopfFactor: Cauchy integral did not converge");
  return (-2.0 * kImag / (params_.lambda - 1.0)) * r.value;
}

Complex WienerHopfFactor::log_V_strip(Complex xi,
                                      std::optional<double> beta) const {
  // All values are based on the single canonical contour; basing different
  // points on different heights would silently cross poles of the
  // exponential regularizer and change the normalization.
  const double b = beta ? *beta : beta1_;
  if (!in_strip(xi, b))
    throw NumericsError("log_V_strip: point outside the construction strip");
  const long long key = cache_key(xi);
  if (key >= 0) {
    auto it = point_cache_.find(key);
    if (it != point_cache_.end()) return it->second;
  }
  const Complex v = cauchy_log_V(xi, b);
  if (key >= 0) point_cache_.emplace(key, v);
  return v;
}

VValue WienerHopfFactor::extend_V(Complex xi) const {
  VValue out;
  const double d = params_.shift();
  const double s_lo = beta1_ - d;  // canonical construction strip
  const double s_hi = beta1_;
  const double m = 1e-12;

  auto classify = [&](Complex w) -> const Singularity* {
    const Singularity* best = nullptr;
    double bd = 1e300;
    for (const auto& s : phi_catalog_.entries) {
      const double dist = std::abs(w - s.location);
      if (dist < bd) {
        bd = dist;
        best = &s;
      }
    }
    if (best && bd < guard_radius_) {
      if (bd > 1e-11) {
        out.near_singularity = true;
        out.nearest_singularity = best->location;
        return nullptr;  // treated as regular, flagged
      }
      return best;  // exact hit
    }
    return nullptr;
  };

  auto add_factor = [&](Complex w, double sgn) {
    // Multiplies (sgn=+1) or divides (sgn=-1) by -Phi(w), with exact zero /
    // pole hits replaced by their regularized leading coefficients.
    if (const Singularity* s = classify(w)) {
      if (s->kind == Singularity::Kind::Zero) {
        out.order += static_cast<int>(sgn);
        out.log_reg += sgn * std::log(-phi_derivative_at_zero(s->n));
      } else {
        out.order -= static_cast<int>(sgn);
        out.log_reg += sgn * std::log(-phi_residue_at_pole(s->n));
      }
    } else {
      out.log_reg += sgn * std::log(-eval_Phi(w, params_));
    }
  };

  Complex cur = xi;
  int steps = 0;
  if (xi.imag() <= s_lo + m) {
    // Ascend: V(xi) = -V(xi + i d) Phi(xi + i d).
    while (cur.imag() <= s_lo + m) {
      cur += Complex{0.0, d};
      add_factor(cur, +1.0);
      if (++steps > 1000)
        throw NumericsError("extend_V: step limit exceeded");
    }
  } else if (xi.imag() >= s_hi - m) {
    // Descend: V(xi) = -V(xi - i d) / Phi(xi) = V(xi - i d) / (-Phi(xi)).
    while (cur.imag() >= s_hi - m) {
      add_factor(cur, -1.0);
      cur -= Complex{0.0, d};
      if (++steps > 1000)
        throw NumericsError("extend_V: step limit exceeded");
    }
  }
  out.log_reg += log_V_strip(cur);
  return out;
}

Complex WienerHopfFactor::log_V(Complex xi) const {
  const VValue v = extend_V(xi);
  if (v.order != 0)
    throw NumericsError("log_V: point is a zero or pole of V");
  return v.log_reg;
}

Complex WienerHopfFactor::eval_V_ratio(Complex xi, Complex y) const {
  if (xi == y) return Complex{1.0, 0.0};
  return std::exp(log_V_ratio(xi, y));
}

Complex WienerHopfFactor::log_V_ratio(Complex xi, Complex y) const {
  if (xi == y) return Complex{0.0, 0.0};
  const double d = params_.shift();
  if (std::abs(xi.imag() - y.imag()) < d) {
    const double beta = ratio_contour_height(xi.imag(), y.imag());
    if (std::isfinite(beta)) {
      const double kap = params_.kappa();
      const double tolq = 0.25 * tol_ * (params_.lambda - 1.0);
      const double pad = std::max(1.5, (-std::log(tolq) + 6.0) / kap + 0.5);
      const double a = std::min(xi.real(), y.real()) - pad;
      const double b = std::max(xi.real(), y.real()) + pad;
      HorizontalContour c;
      c.height = beta;
      c.center = 0.5 * (a + b);
      c.half_length = 0.5 * (b - a);
      c.anchors = {xi.real(), y.real()};
      c.node_budget = 600000;
      // Split off the constant part of log(-Phi): the bracket alone
      // integrates in closed form to (y - xi), so only the variation of
      // log(-Phi) around the midpoint needs quadrature. This keeps the
      // integrand small and cheap for widely separated arguments.
      const Complex lc =
          log_neg_phi_cached(0.5 * (xi.real() + y.real()), beta);
      auto f = [&](Complex eta) {
        const Complex lphi = log_neg_phi_cached(eta.real(), beta) - lc;
        return lphi * (inv_one_minus_exp(kap * (xi - eta)) -
                       inv_one_minus_exp(kap * (y - eta)));
      };
      auto r = integrate_line(f, c, tolq * std::max(1.0, 0.02 * (b - a)));
      return (-2.0 * kImag / (params_.lambda - 1.0)) * (r.value + lc * (y - xi));
    }
  }
  // General points: bring both into the canonical strip through the
  // difference equation, then take the localized in-strip ratio.
  int k1 = 0, k2 = 0;
  const Complex f1 = strip_shift_factors(xi, &k1);
  const Complex f2 = strip_shift_factors(y, &k2);
  const Complex xc = xi + Complex{0.0, k1 * d};
  const Complex yc = y + Complex{0.0, k2 * d};
  if (xc == yc) return f1 - f2;
  if (k1 != 0 || k2 != 0) return f1 - f2 + log_V_ratio(xc, yc);
  // Both already in the strip but with no common integration gap (heights
  // hugging opposite edges): fall back to two full strip evaluations.
  return log_V_strip(xi) - log_V_strip(y);
}

int WienerHopfFactor::order_at(Complex at) const { return extend_V(at).order; }

SingularityCatalog WienerHopfFactor::catalog_V_singularities(int count) const {
  if (count < 1)
    throw NumericsError("catalog_V_singularities: count >= 1");
  const double d = params_.shift();
  const double lam = params_.lambda;
  std::vector<double> cand;
  const int kmax = count + 4 + static_cast<int>(4.0 / d);
  for (int n = 1; n <= count + 4; ++n)
    for (int k = 0; k <= kmax; ++k) {
      cand.push_back(1.0 + 0.5 * lam + n + 0.5 * k * (lam - 1.0));
      cand.push_back(0.5 * (1.0 + lam) + n + 0.5 * k * (lam - 1.0));
    }
  for (int k = 1; k <= kmax; ++k) {
    cand.push_back(0.5 * (1.0 + lam) - 0.5 * k * (lam - 1.0));
    cand.push_back(1.0 + 0.5 * lam - 0.5 * k * (lam - 1.0));
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-10; }),
             cand.end());

  SingularityCatalog cat;
  int zeros = 0, poles = 0;
  // Walk outward from the strip so the entries nearest the strip come first.
  std::stable_sort(cand.begin(), cand.end(), [&](double a, double b) {
    const double c = 0.5 * (params_.strip_lo() + params_.strip_hi());
    return std::abs(a - c) < std::abs(b - c);
  });
  for (double h : cand) {
    if (zeros >= count && poles >= count) break;
    const int ord = order_at(Complex{0.0, h});
    if (ord == 0) continue;
    Singularity s;
    s.kind = ord > 0 ? Singularity::Kind::Zero : Singularity::Kind::Pole;
    s.location = Complex{0.0, h};
    s.order = std::abs(ord);
    if (ord > 0 && zeros < count) {
      cat.entries.push_back(s);
      ++zeros;
    } else if (ord < 0 && poles < count) {
      cat.entries.push_back(s);
      ++poles;
    }
  }
  std::sort(cat.entries.begin(), cat.entries.end(),
            [](const Singularity& a, const Singularity& b) {
              return a.location.imag() < b.location.imag();
            });
  return cat;
}

Complex WienerHopfFactor::residue_V(Complex at) const {
  const VValue v = extend_V(at);
  if (v.order != -1)
    throw NumericsError("residue_V: not a simple pole of V");
  return std::exp(v.log_reg);
}

Complex WienerHopfFactor::derivative_V(Complex at, double radius) const {
  auto f = [&](Complex z) {
    const Complex dz = z - at;
    return eval_V(z) / (dz * dz);
  };
  return residue_circle(f, at, radius);
}

namespace {
long long height_key(double h) {
  return static_cast<long long>(std::llround((h - 1.0) * 1e9));
}
}  // namespace

bool WienerHopfFactor::line_ready(double height, double extent) const {
  const double d = params_.shift();
  double h = height;
  while (h <= beta1_ - d + 1e-12) h += d;
  while (h >= beta1_ - 1e-12) h -= d;
  auto it = logv_lines_.find(height_key(h));
  return it != logv_lines_.end() && it->second.lo() <= -extent &&
         it->second.hi() >= extent;
}

void WienerHopfFactor::warm_line(double height, double extent) const {
  if (line_ready(height, extent)) return;
  const double d = params_.shift();
  double h = height;
  while (h <= beta1_ - d + 1e-12) h += d;
  while (h >= beta1_ - 1e-12) h -= d;
  if (h <= beta1_ - d + 1e-12)
    throw NumericsError("warm_line: height aligns with the contour lattice");
  prepare_lphi_segment(-extent - 8.0, extent + 8.0);
  auto tab = ChebLineTable::build(
      [&](double x) { return cauchy_log_V(Complex{x, h}, beta1_); }, -extent,
      extent, 10.0 * tol_, 16, 120000);
  logv_lines_.insert_or_assign(height_key(h), std::move(tab));
}

Complex WienerHopfFactor::strip_shift_product(Complex xi, int* k_out) const {
  const double d = params_.shift();
  const double s_lo = beta1_ - d;
  const double s_hi = beta1_;
  Complex prod{1.0, 0.0};
  int k = 0;
  double h = xi.imag();
  while (h <= s_lo + 1e-12) {
    h += d;
    ++k;
    prod *= -eval_Phi(Complex{xi.real(), h}, params_);
  }
  while (h >= s_hi - 1e-12) {
    prod /= -eval_Phi(Complex{xi.real(), h}, params_);
    h -= d;
    --k;
  }
  if (h <= s_lo + 1e-12)
    throw NumericsError("strip_shift_product: height aligns with the contour lattice");
  *k_out = k;
  return prod;
}

Complex WienerHopfFactor::log_V_line(double height, double re,
                                     double range) const {
  const double d = params_.shift();
  const double s_lo = beta1_ - d;
  const double s_hi = beta1_;

  // Shift the height into the canonical strip; the matching difference
  // equation factors are evaluated per point below.
  int k_up = 0, k_down = 0;
  double h = height;
  while (h <= s_lo + 1e-12) {
    h += d;
    ++k_up;
  }
  while (h >= s_hi - 1e-12) {
    h -= d;
    ++k_down;
  }
  if (h <= s_lo + 1e-12)
    throw NumericsError(
        "log_V_line: height aligns with the construction contour lattice");

  Complex base;
  const long long hkey = height_key(h);
  auto it = logv_lines_.find(hkey);
  if (it != logv_lines_.end() && it->second.covers(re)) {
    base = it->second.eval(re);
  } else if (std::abs(re) <= range) {
    auto tab = ChebLineTable::build(
        [&](double x) { return cauchy_log_V(Complex{x, h}, beta1_); }, -range,
        range, 10.0 * tol_);
    logv_lines_.insert_or_assign(hkey, std::move(tab));
    base = logv_lines_.at(hkey).eval(re);
  } else {
    base = log_V_strip(Complex{re, h});
  }

  for (int j = 1; j <= k_up; ++j)
    base += std::log(-eval_Phi(Complex{re, height + j * d}, params_));
  for (int j = 0; j < k_down; ++j)
    base -= std::log(-eval_Phi(Complex{re, height - j * d}, params_));
  return base;
}

void WienerHopfFactor::save_cache(const std::string& path) const {
  nlohmann::json j;
  j["schema"] = "coag-factor-cache-1";
  j["lambda"] = hex_double(params_.lambda);
  j["beta1"] = hex_double(beta1_);
  j["tol"] = hex_double(tol_);
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [key, v] : point_cache_) {
    pts.push_back({key, hex_double(v.real()), hex_double(v.imag())});
  }
  j["points"] = std::move(pts);
  std::ofstream out(path);
  if (!out) throw NumericsError("save_cache: cannot open " + path);
  out << j.dump();
}

WienerHopfFactor WienerHopfFactor::load_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericsError("load_cache: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("schema", "") != "coag-factor-cache-1")
    throw NumericsError("load_cache: unknown schema");
  WienerHopfFactor f(KernelParams(parse_hex_double(j["lambda"])),
                     parse_hex_double(j["beta1"]),
                     parse_hex_double(j["tol"]));
  for (const auto& p : j["points"]) {
    f.point_cache_.emplace(
        p[0].get<long long>(),
        Complex{parse_hex_double(p[1].get<std::string>()),
                parse_hex_double(p[2].get<std::string>())});
  }
  return f;
}

}  // namespace coag
