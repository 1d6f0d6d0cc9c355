#include "flock/ldp.hpp"

#include <cmath>
#include <stdexcept>

#include "flock/geometry.hpp"
#include "flock/quadrature.hpp"
#include "flock/roots.hpp"

namespace flock {

namespace {

double pow_int(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Radial integral d*pi_d * int_0^R g(f(x)) x^{d-1} dx, split at the shift
// plateau boundary. The upper limit is pulled in by one ulp so bounded
// kernels keep their open-support value at the endpoint.
template <class G>
double radial_integral(const Kernel& k, int d, const G& g) {
  double R = k.support_end() * (1.0 - 1e-15);
  double plateau = k.shift() * k.radius();
  auto integrand = [&](double x) { return g(k.eval(x)) * pow_int(x, d - 1); };
  double total = 0.0;
  if (plateau > 0.0 && plateau < R) {
    total += integrate(integrand, 0.0, plateau);
    total += integrate(integrand, plateau, R);
  } else {
    total += integrate(integrand, 0.0, R);
  }
  return d * unit_ball_volume(d) * total;
}

// Composite Simpson nodes/weights on [0,1] with an odd point count.
void simpson_rule(int points, std::vector<double>& x, std::vector<double>& w) {
  x.resize(points);
  w.resize(points);
  double h = 1.0 / (points - 1);
  for (int i = 0; i < points; ++i) {
    x[i] = i * h;
    w[i] = (i == 0 || i == points - 1) ? h / 3.0
           : (i % 2 == 1)              ? 4.0 * h / 3.0
                                       : 2.0 * h / 3.0;
  }
}

MomentTriple moments_cubature(const Kernel& kernel, int d, double theta) {
  int points = d == 2 ? 129 : d == 3 ? 65 : 33;
  std::vector<double> x, w;
  simpson_rule(points, x, w);
  MomentTriple out;
  out.cubature_fallback = true;
  double m0 = 0.0, m1 = 0.0, mean = 0.0;
  std::vector<int> idx(d, 0);
  while (true) {
    double weight = 1.0, dist2 = 0.0;
    for (int j = 0; j < d; ++j) {
      weight *= w[idx[j]];
      double c = x[idx[j]] - 0.5;
      dist2 += c * c;
    }
    double xi = kernel.eval(std::sqrt(dist2));
    double e = std::exp(theta * xi);
    m0 += weight * e;
    m1 += weight * xi * e;
    mean += weight * xi;
    int j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < points) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
  out.m0 = m0;
  out.m1 = m1;
  out.mean = mean;
  return out;
}

}  // namespace

MomentTriple moments(const Kernel& kernel, int d, double theta) {
  if (d < 2) throw std::invalid_argument("moments requires d >= 2");
  if (theta < 0.0) throw std::invalid_argument("theta must be nonnegative");
  double R = kernel.support_end();
  if (R > 0.5) return moments_cubature(kernel, d, theta);
  double pid = unit_ball_volume(d);
  MomentTriple out;
  out.m0 = 1.0 - pid * pow_int(R, d) +
           radial_integral(kernel, d,
                           [&](double f) { return std::exp(theta * f); });
  out.m1 = radial_integral(
      kernel, d, [&](double f) { return f * std::exp(theta * f); });
  out.mean = radial_integral(kernel, d, [](double f) { return f; });
  return out;
}

bool is_degenerate(const Kernel& kernel, int d) {
  double corner = 0.5 * std::sqrt(static_cast<double>(d));
  double f0 = kernel.peak();
  return f0 > 0.0 && kernel.eval(corner) >= f0 * (1.0 - 1e-12);
}

double rate_function(const Kernel& kernel, int n, int d, double x) {
  if (x < 0.0) throw std::invalid_argument("rate_function requires x >= 0");
  if (is_degenerate(kernel, d))
    throw std::invalid_argument("rate_function: degenerate kernel");
  double mean = moments(kernel, d, 0.0).mean;
  if (x <= (n - 1) * mean) return 0.0;  // sup attained as theta -> 0+
  double f0 = kernel.peak();
  auto stationarity = [&](double theta) {
    MomentTriple m = moments(kernel, d, theta);
    return (n - 1) * m.m1 / m.m0 - x;
  };
  double theta_star = bisect_expanding(stationarity, 0.0, 1.0 / f0, 0.0);
  MomentTriple m = moments(kernel, d, theta_star);
  return theta_star * x - (n - 1) * std::log(m.m0);
}

RateSolution solve_kbar(const Kernel& kernel, int n, int d) {
  if (n < 2) throw std::invalid_argument("solve_kbar requires n >= 2");
  RateSolution sol;
  double f0 = kernel.peak();
  if (is_degenerate(kernel, d)) {
    sol.degenerate = true;
    sol.kbar = (n - 1) * f0;
    sol.mean_xi = f0;
    return sol;
  }
  MomentTriple m0 = moments(kernel, d, 0.0);
  sol.mean_xi = m0.mean;
  double logn = std::log(static_cast<double>(n));
  // F(theta) = I_{n,delta}(x(theta)) - log n along the stationarity curve
  // x(theta) = (n-1) m1/m0; strictly increasing, F(0+) = -log n.
  auto level = [&](double theta) {
    MomentTriple m = moments(kernel, d, theta);
    double x = (n - 1) * m.m1 / m.m0;
    return theta * x - (n - 1) * std::log(m.m0) - logn;
  };
  double thetabar = bisect_expanding(level, 0.0, 1.0 / f0, 0.0);
  MomentTriple m = moments(kernel, d, thetabar);
  double a = (n - 1) * m.m1 / m.m0;
  double b = (logn + (n - 1) * std::log(m.m0)) / thetabar;
  sol.kbar = a;
  sol.thetabar = thetabar;
  sol.residual_stationarity = std::fabs(a - b) / std::fabs(a);
  sol.residual_level = std::fabs(rate_function(kernel, n, d, a) - logn) / logn;
  return sol;
}

double H(double a) {
  if (a < 0.0) throw std::invalid_argument("H requires a >= 0");
  if (a == 0.0) return 1.0;
  return 1.0 - a + a * std::log(a);
}

double H_minus_inv(double y) {
  if (y < 0.0 || y > 1.0)
    throw std::invalid_argument("H_minus_inv requires y in [0,1]");
  // H decreases from 1 to 0 on [0,1].
  return bisect([&](double a) { return y - H(a); }, 0.0, 1.0, 1e-12);
}

double H_plus_inv(double y) {
  if (y < 0.0) throw std::invalid_argument("H_plus_inv requires y >= 0");
  double hi = 2.0;
  while (H(hi) < y) hi *= 2.0;
  return bisect([&](double a) { return H(a) - y; }, 1.0, hi, 1e-12);
}

AsymptoticPair example2_asymptotic(double c, double b_n, int d, int n) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  double pid_cd = unit_ball_volume(d) * pow_int(c, d);
  double a = H_plus_inv(1.0 / pid_cd);
  AsymptoticPair out;
  out.kbar = a * pid_cd * b_n * std::log(static_cast<double>(n));
  out.theta = std::log(a) / b_n;
  return out;
}

AsymptoticPair example3_asymptotic(double c, double b_n, int d, int n) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  double pid = unit_ball_volume(d);
  double rhs = 1.0 / (d * pid * pow_int(c, d)) - 1.0 / d;
  auto lhs = [&](double x) {
    double i1 = integrate(
        [&](double y) { return y * std::exp(x * y) * pow_int(1.0 - y, d - 1); },
        0.0, 1.0);
    double i0 = integrate(
        [&](double y) { return std::exp(x * y) * pow_int(1.0 - y, d - 1); },
        0.0, 1.0);
    return x * i1 - i0 - rhs;
  };
  double x_star = bisect_expanding(lhs, 0.0, 1.0, 0.0);
  double i1 = integrate(
      [&](double y) {
        return y * std::exp(x_star * y) * pow_int(1.0 - y, d - 1);
      },
      0.0, 1.0);
  AsymptoticPair out;
  out.kbar = d * pid * pow_int(c, d) * b_n *
             std::log(static_cast<double>(n)) * i1;
  out.theta = x_star / b_n;
  return out;
}

}  // namespace flock
