#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace resolab::detail {

// Supremum of a continuous f over [lo, hi]: dense scan, then golden-section
// refinement around the best sample.
inline double sup_on_interval(const std::function<double(double)>& f, double lo, double hi,
                              std::size_t samples = 10000) {
  if (hi <= lo) return f(lo);
  double best = -std::numeric_limits<double>::infinity();
  double best_r = lo;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
    const double v = f(r);
    if (v > best) {
      best = v;
      best_r = r;
    }
  }
  const double step = (hi - lo) / static_cast<double>(samples);
  double a = std::max(lo, best_r - step), b = std::min(hi, best_r + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-10 * (1.0 + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

// Adaptive Simpson quadrature with a relative tolerance.
inline double adaptive_simpson_impl(const std::function<double(double)>& f, double a, double b,
                                    double fa, double fm, double fb, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-10, int max_depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max({std::abs(whole), std::abs(b - a) * std::abs(fm), 1e-300});
  return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

}  // namespace resolab::detail
