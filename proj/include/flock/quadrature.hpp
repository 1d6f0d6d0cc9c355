#pragma once

#include <cmath>
#include <functional>

namespace flock {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol,
                            int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double h = b - a;
  double left = (h / 12.0) * (fa + 4.0 * flm + fm);
  double right = (h / 12.0) * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature. The tolerance is relative to a first crude
// estimate of the integral magnitude, with an absolute floor for integrands
// that are identically small.
template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 1e-14) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  double tol = std::max(abs_tol, rel_tol * std::fabs(whole));
  // Seed with a fixed 16-panel split so narrow features are not missed.
  const int panels = 16;
  double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    double x0 = a + i * h, x1 = a + (i + 1) * h;
    double f0 = f(x0), f1 = f(x1), fmid = f(0.5 * (x0 + x1));
    double est = (h / 6.0) * (f0 + 4.0 * fmid + f1);
    sum += detail::adaptive_simpson_rec(f, x0, x1, f0, fmid, f1, est,
                                        tol / panels, 48);
  }
  return sum;
}

}  // namespace flock
