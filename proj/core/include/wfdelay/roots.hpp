#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "wfdelay/errors.hpp"

namespace wfdelay {

struct RootOptions {
  double x_tol = 0.0;  // absolute step tolerance; 0 means machine precision
  int max_iter = 100;
  double guess = std::numeric_limits<double>::quiet_NaN();  // starting point inside the bracket
};

// Newton iteration kept inside a sign-changing bracket; falls back to bisection
// whenever the Newton step leaves the bracket or converges too slowly.
// fdf(x) returns {f(x), f'(x)}.
template <class Fdf>
double safeguarded_newton(Fdf&& fdf, double lo, double hi, double f_lo, double f_hi,
                          const RootOptions& opt = {}) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    fail(ErrorKind::InternalInvariant, "safeguarded_newton: interval does not bracket a root");
  // orient so that f(xl) < 0 < f(xh)
  double xl = lo, xh = hi;
  if (f_lo > 0.0) std::swap(xl, xh);

  double x = 0.5 * (lo + hi);
  if (std::isfinite(opt.guess) && opt.guess > std::min(lo, hi) && opt.guess < std::max(lo, hi)) x = opt.guess;
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  auto [f, df] = fdf(x);
  for (int it = 0; it < opt.max_iter; ++it) {
    const bool out = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
    const bool slow = std::abs(2.0 * f) > std::abs(dx_old * df);
    dx_old = dx;
    if (out || slow) {
      dx = 0.5 * (xh - xl);
      x = xl + dx;
    } else {
      dx = f / df;
      x -= dx;
    }
    const double tol = opt.x_tol > 0.0 ? opt.x_tol
                                       : 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x));
    if (std::abs(dx) <= tol) return x;
    std::tie(f, df) = fdf(x);
    if (f == 0.0) return x;
    if (f < 0.0) xl = x; else xh = x;
    if (std::abs(xh - xl) <= tol) return x;
  }
  return x;  // caller verifies the residual
}

// Plain bisection to adjacent doubles. f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, int max_iter = 200) {
  const bool neg_lo = f_lo < 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == neg_lo) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wfdelay
