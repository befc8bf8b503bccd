#include "coag/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace coag {
namespace {

std::vector<Complex> fit_coefficients(const std::function<Complex(double)>& f,
                                      double a, double b, int degree,
                                      std::vector<Complex>* values_out) {
  const int n = degree;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::vector<Complex> v(n + 1);
  for (int j = 0; j <= n; ++j)
    v[j] = f(mid + half * std::cos(kPi * j / n));
  if (values_out) *values_out = v;
  std::vector<Complex> c(n + 1);
  for (int k = 0; k <= n; ++k) {
    Complex s = 0.5 * (v[0] + (k % 2 == 0 ? v[n] : -v[n]));
    for (int j = 1; j < n; ++j) s += v[j] * std::cos(kPi * j * k / n);
    c[k] = s * (2.0 / n);
  }
  c[0] *= 0.5;
  c[n] *= 0.5;
  return c;
}

Complex clenshaw(const std::vector<Complex>& c, double u) {
  Complex y1{0.0, 0.0}, y2{0.0, 0.0};
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
    const Complex y = 2.0 * u * y1 - y2 + c[k];
    y2 = y1;
    y1 = y;
  }
  return u * y1 - y2 + c[0];
}

double tail_magnitude(const std::vector<Complex>& c) {
  const std::size_t n = c.size();
  double m = 0.0;
  for (std::size_t k = n >= 3 ? n - 3 : 0; k < n; ++k)
    m = std::max(m, std::abs(c[k]));
  return m;
}

}  // namespace

ChebLineTable ChebLineTable::build(const std::function<Complex(double)>& f,
                                   double a, double b, double tol_abs,
                                   int degree, int max_panels) {
  if (!(b > a)) throw NumericsError("ChebLineTable: empty interval");
  ChebLineTable t;
  t.a_ = a;
  t.b_ = b;
  std::deque<std::pair<double, double>> work{{a, b}};
  while (!work.empty()) {
    auto [pa, pb] = work.front();
    work.pop_front();
    auto coef = fit_coefficients(f, pa, pb, degree, nullptr);
    // do not chase tolerances below the evaluation noise of the fitted values
    double vmax = 0.0;
    for (const auto& c : coef) vmax = std::max(vmax, std::abs(c));
    const double floor_eff = std::max(tol_abs, 64.0 * 2.22e-16 * vmax);
    const bool small_tail = tail_magnitude(coef) <= floor_eff;
    // Off-grid spot check guards against aliasing on the Lobatto grid.
    bool spot_ok = true;
    if (small_tail) {
      const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      for (double u : {-0.83, 0.31, 0.77}) {
        const Complex p = clenshaw(coef, u);
        if (std::abs(p - f(mid + half * u)) > 8.0 * floor_eff) {
          spot_ok = false;
          break;
        }
      }
    }
    if ((small_tail && spot_ok) ||
        static_cast<int>(t.panels_.size()) + static_cast<int>(work.size()) + 2 >
            max_panels ||
        pb - pa < 1e-11 * (std::abs(pa) + 1.0)) {
      t.panels_.push_back({pa, pb, std::move(coef)});
    } else {
      const double mid = 0.5 * (pa + pb);
      work.push_front({mid, pb});
      work.push_front({pa, mid});
    }
  }
  std::sort(t.panels_.begin(), t.panels_.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  return t;
}

Complex ChebLineTable::eval(double x) const {
  if (panels_.empty()) throw NumericsError("ChebLineTable: empty table");
  if (x < a_ || x > b_)
    throw NumericsError("ChebLineTable: point outside the fitted range");
  // Binary search for the covering panel.
  std::size_t lo = 0, hi = panels_.size() - 1;
  while (lo < hi) {
    const std::size_t m = (lo + hi + 1) / 2;
    if (panels_[m].a <= x)
      lo = m;
    else
      hi = m - 1;
  }
  const Panel& p = panels_[lo];
  const double u = std::clamp(2.0 * (x - p.a) / (p.b - p.a) - 1.0, -1.0, 1.0);
  return clenshaw(p.coef, u);
}

ChebLineTable ChebLineTable::derivative() const {
  ChebLineTable d;
  d.a_ = a_;
  d.b_ = b_;
  for (const Panel& p : panels_) {
    const int n = static_cast<int>(p.coef.size()) - 1;
    std::vector<Complex> e(n + 2, Complex{0.0, 0.0});
    for (int k = n; k >= 1; --k)
      e[k - 1] = (k + 1 <= n ? e[k + 1] : Complex{0.0, 0.0}) +
                 2.0 * static_cast<double>(k) * p.coef[k];
    e.resize(n);
    if (!e.empty()) e[0] *= 0.5;
    const double scale = 2.0 / (p.b - p.a);
    for (auto& x : e) x *= scale;
    d.panels_.push_back({p.a, p.b, std::move(e)});
  }
  return d;
}

}  // namespace coag
