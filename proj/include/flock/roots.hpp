#pragma once

#include <cmath>
#include <stdexcept>

namespace flock {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bisection on [lo, hi]; requires a sign change. Converges to the stated
// absolute tolerance on the argument (plus a relative floor).
template <class F>
double bisect(const F& f, double lo, double hi, double x_tol = 1e-12) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw ConvergenceError("bisect: no sign change in bracket");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fhi > 0.0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
    if (hi - lo <= x_tol + 1e-15 * std::fabs(hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Finds a root of an increasing-at-infinity function with f(lo) < 0 by
// doubling the upper end until a sign change appears, then bisecting.
template <class F>
double bisect_expanding(const F& f, double lo, double hi0,
                        double x_tol = 1e-12, int max_doublings = 200) {
  double hi = hi0;
  int k = 0;
  while (f(hi) < 0.0) {
    if (++k > max_doublings)
      throw ConvergenceError(
          "bisect_expanding: no sign change after doubling the bracket");
    lo = hi;
    hi *= 2.0;
  }
  return bisect(f, lo, hi, x_tol);
}

}  // namespace flock
