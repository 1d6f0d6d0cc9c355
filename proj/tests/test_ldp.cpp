#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "flock/geometry.hpp"
#include "flock/kernel.hpp"
#include "flock/ldp.hpp"
#include "flock/rng.hpp"

using namespace flock;

namespace {

// Monte Carlo moments of xi = f(||X - center||), X uniform in the cube.
MomentTriple mc_moments(const Kernel& k, int d, double theta, int samples,
                        std::uint64_t seed) {
  Rng rng(seed);
  MomentTriple out;
  double m0 = 0.0, m1 = 0.0, mean = 0.0;
  for (int s = 0; s < samples; ++s) {
    double dist2 = 0.0;
    for (int j = 0; j < d; ++j) {
      double c = rng.next_double() - 0.5;
      dist2 += c * c;
    }
    double xi = k.eval(std::sqrt(dist2));
    double e = std::exp(theta * xi);
    m0 += e;
    m1 += xi * e;
    mean += xi;
  }
  out.m0 = m0 / samples;
  out.m1 = m1 / samples;
  out.mean = mean / samples;
  return out;
}

// Legendre-transform oracle for the indicator kernel: closed-form m0 plus
// dense grid search with local ternary refinement. Entirely independent of
// the production stationarity bisection.
double indicator_rate_oracle(double b, double r, int n, int d, double x) {
  double pr = unit_ball_volume(d) * std::pow(r, d);
  auto objective = [&](double theta) {
    double m0 = 1.0 + (std::exp(theta * b) - 1.0) * pr;
    return theta * x - (n - 1) * std::log(m0);
  };
  int points = 100000;
  double hi = 50.0 / b;
  double best = 0.0;
  int best_i = 0;
  for (int i = 1; i <= points; ++i) {
    double v = objective(hi * i / points);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double lo_t = hi * (best_i - 1) / points;
  double hi_t = hi * (best_i + 1) / points;
  for (int it = 0; it < 200; ++it) {
    double a = lo_t + (hi_t - lo_t) / 3.0;
    double c = hi_t - (hi_t - lo_t) / 3.0;
    if (objective(a) < objective(c))
      lo_t = a;
    else
      hi_t = c;
  }
  return std::max(best, objective(0.5 * (lo_t + hi_t)));
}

}  // namespace

TEST_CASE("indicator m0 matches the closed form") {
  for (double theta : {0.5, 2.0, 7.0, 31.0}) {
    for (double b : {0.03, 0.2}) {
      for (double r : {0.05, 0.21}) {
        Kernel k = Kernel::indicator(b, r);
        double expect =
            1.0 + (std::exp(theta * b) - 1.0) * std::numbers::pi * r * r;
        MomentTriple m = moments(k, 2, theta);
        CHECK_FALSE(m.cubature_fallback);
        CHECK(m.m0 == doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("power-cap mean matches the closed form") {
  for (double g : {0.5, 1.0, 2.0, 4.0}) {
    for (int d : {2, 3}) {
      double c = 0.7, r = 0.18;
      Kernel k = Kernel::power_cap(c, r, g);
      double expect = g * c * unit_ball_volume(d) * std::pow(r, d) / (g + d);
      CHECK(moments(k, d, 0.0).mean == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("moments at theta = 0 collapse to (1, mean, mean)") {
  Kernel k = Kernel::triangular(0.4, 0.2);
  MomentTriple m = moments(k, 2, 0.0);
  CHECK(m.m0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.m1 == doctest::Approx(m.mean).epsilon(1e-12));
}

TEST_CASE("moments agree with Monte Carlo across families") {
  std::vector<Kernel> kernels = {
      Kernel::indicator(0.1, 0.15),
      Kernel::triangular(0.3, 0.2),
      Kernel::power_cap(0.2, 0.25, 2.0),
      Kernel::triangular(0.3, 0.2).shifted(0.4),
  };
  int idx = 0;
  for (const Kernel& k : kernels) {
    double theta = 3.0;
    MomentTriple exact = moments(k, 2, theta);
    MomentTriple mc = mc_moments(k, 2, theta, 400000, split_seed(88, idx++));
    CHECK(exact.m0 == doctest::Approx(mc.m0).epsilon(1e-2));
    CHECK(exact.m1 == doctest::Approx(mc.m1).epsilon(2e-2));
    CHECK(exact.mean == doctest::Approx(mc.mean).epsilon(2e-2));
  }
}

TEST_CASE("large-support kernels trigger the cubature fallback, still exact") {
  Kernel k = Kernel::triangular(0.05, 0.6);  // support beyond the half-width
  MomentTriple m = moments(k, 2, 4.0);
  CHECK(m.cubature_fallback);
  MomentTriple mc = mc_moments(k, 2, 4.0, 400000, 4242);
  CHECK(m.m0 == doctest::Approx(mc.m0).epsilon(1e-2));
  CHECK(m.m1 == doctest::Approx(mc.m1).epsilon(2e-2));
  CHECK(m.mean == doctest::Approx(mc.mean).epsilon(2e-2));

  CHECK_FALSE(moments(Kernel::triangular(0.05, 0.2), 2, 4.0).cubature_fallback);
}

TEST_CASE("log m0 is convex and m1/m0 is increasing in theta") {
  Kernel k = Kernel::power_cap(0.15, 0.2, 1.5);
  std::vector<double> logs, ratios;
  for (int i = 0; i <= 40; ++i) {
    double theta = 0.5 * i;
    MomentTriple m = moments(k, 2, theta);
    logs.push_back(std::log(m.m0));
    ratios.push_back(m.m1 / m.m0);
  }
  for (size_t i = 1; i + 1 < logs.size(); ++i)
    CHECK(logs[i + 1] - 2.0 * logs[i] + logs[i - 1] >= -1e-12);
  for (size_t i = 1; i < ratios.size(); ++i)
    CHECK(ratios[i] >= ratios[i - 1] - 1e-14);
}

TEST_CASE("rate function vanishes at and below the mean total weight") {
  Kernel k = Kernel::indicator(0.1, 0.1);
  int n = 50;
  double mean_total = (n - 1) * moments(k, 2, 0.0).mean;
  CHECK(rate_function(k, n, 2, 0.0) == 0.0);
  CHECK(rate_function(k, n, 2, 0.5 * mean_total) == 0.0);
  CHECK(rate_function(k, n, 2, mean_total) == 0.0);
  CHECK(rate_function(k, n, 2, 2.0 * mean_total) > 0.0);
}

TEST_CASE("rate function matches an independent Legendre grid oracle") {
  double b = 0.08, r = 0.12;
  Kernel k = Kernel::indicator(b, r);
  int n = 100, d = 2;
  double mean_total = (n - 1) * moments(k, d, 0.0).mean;
  for (double mult : {1.5, 2.0, 4.0, 10.0}) {
    double x = mult * mean_total;
    double oracle = indicator_rate_oracle(b, r, n, d, x);
    CHECK(rate_function(k, n, d, x) ==
          doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("degenerate kernels return (n-1) f(0) exactly") {
  // Support covers the whole cube: the total weight is a.s. constant.
  Kernel k = Kernel::indicator(0.05, 1.5);
  RateSolution sol = solve_kbar(k, 10, 2);
  CHECK(sol.degenerate);
  CHECK(sol.kbar == 9 * 0.05);
  CHECK_FALSE(sol.thetabar.has_value());
  CHECK_THROWS_AS(rate_function(k, 10, 2, 1.0), std::invalid_argument);
}

TEST_CASE("level-crossing solutions satisfy both defining identities") {
  Rng rng(909);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    double b = 0.02 + 0.2 * rng.next_double();
    double r = 0.03 + 0.15 * rng.next_double();
    int n = 50 + static_cast<int>(rng.next_u64() % 2000);
    int d = 2 + static_cast<int>(rng.next_u64() % 2);
    Kernel k = trial % 3 == 0   ? Kernel::indicator(b, r)
               : trial % 3 == 1 ? Kernel::triangular(b, r)
                                : Kernel::power_cap(b, r, 2.0);
    if (trial % 5 == 0) k = k.shifted(0.2);
    RateSolution sol = solve_kbar(k, n, d);
    REQUIRE_FALSE(sol.degenerate);
    CHECK(sol.residual_stationarity <= 1e-8);
    CHECK(sol.residual_level <= 1e-8);
    CHECK(sol.kbar > (n - 1) * sol.mean_xi);
    CHECK(sol.thetabar.has_value());
    // Cross-check the level equation against the rate function directly.
    double I = rate_function(k, n, d, sol.kbar);
    CHECK(I == doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-8));
    ++checked;
  }
  CHECK(checked == 30);
}

TEST_CASE("H and its inverse branches") {
  CHECK(H(0.0) == 1.0);
  CHECK(H(1.0) == 0.0);
  CHECK(H(2.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-15));
  CHECK(H_plus_inv(1.0) == doctest::Approx(std::numbers::e).epsilon(1e-10));
  CHECK(H_plus_inv(2.0 * std::log(2.0) - 1.0) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(H_minus_inv(1.0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(H_minus_inv(0.0) == doctest::Approx(1.0).epsilon(1e-10));
  for (double a : {0.1, 0.35, 0.8}) {
    CHECK(H_minus_inv(H(a)) == doctest::Approx(a).epsilon(1e-10));
  }
  for (double a : {1.2, 2.7, 6.0}) {
    CHECK(H_plus_inv(H(a)) == doctest::Approx(a).epsilon(1e-10));
  }
  CHECK_THROWS_AS(H(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(H_minus_inv(1.5), std::invalid_argument);
  CHECK_THROWS_AS(H_plus_inv(-0.1), std::invalid_argument);
}

TEST_CASE("indicator asymptotic closed form matches the solver at large n") {
  int d = 2, n = 1000000;
  double c = 1.0 / std::sqrt(std::numbers::pi);  // pi_d c^d = 1
  double b = 0.01;
  double r = c * std::pow(std::log(static_cast<double>(n)) / n, 1.0 / d);
  AsymptoticPair asym = example2_asymptotic(c, b, d, n);
  // With pi_d c^d = 1 the prefactor is H_plus_inv(1) = e.
  CHECK(asym.kbar == doctest::Approx(std::numbers::e * b *
                                     std::log(static_cast<double>(n)))
                         .epsilon(1e-10));
  CHECK(asym.theta * b == doctest::Approx(1.0).epsilon(1e-10));
  RateSolution sol = solve_kbar(Kernel::indicator(b, r), n, d);
  CHECK(sol.kbar == doctest::Approx(asym.kbar).epsilon(0.10));
  CHECK(*sol.thetabar == doctest::Approx(asym.theta).epsilon(0.10));

  // theta * b does not depend on the amplitude.
  AsymptoticPair asym2 = example2_asymptotic(c, 5.0 * b, d, n);
  CHECK(asym2.theta * 5.0 * b == doctest::Approx(asym.theta * b));
}

TEST_CASE("triangular asymptotic solve matches the solver at large n") {
  int d = 2, n = 1000000;
  double c = 1.0 / std::sqrt(std::numbers::pi);
  double b = 0.01;
  double r = c * std::pow(std::log(static_cast<double>(n)) / n, 1.0 / d);
  AsymptoticPair asym = example3_asymptotic(c, b, d, n);
  CHECK(asym.kbar > 0.0);
  CHECK(asym.theta > 0.0);
  RateSolution sol = solve_kbar(Kernel::triangular(b, r), n, d);
  CHECK(sol.kbar == doctest::Approx(asym.kbar).epsilon(0.15));
  CHECK(*sol.thetabar == doctest::Approx(asym.theta).epsilon(0.15));
}

TEST_CASE("ratio diagnostics stay bounded along a dense radius law") {
  // Power-cap family on a radius scale well above critical: the total
  // weight concentrates, so kbar tracks n E[xi] and the theta ratio stays
  // within a constant factor across the n-grid.
  int d = 2;
  double gamma = 1.0;
  auto gen = [&](int n) {
    double logn = std::log(static_cast<double>(n));
    double r = std::pow(static_cast<double>(n), -1.0 / d) * logn;
    double c = 1.0 / (unit_ball_volume(d) * std::pow(logn, d));
    return Kernel::power_cap(c, r, gamma);
  };
  std::vector<int> grid = {1000, 10000, 100000, 1000000};
  Proposition1Report rep = proposition1_checks(gen, d, grid);
  REQUIRE(rep.kbar.size() == grid.size());
  CHECK(rep.mean_ratio.back() > 1.0);
  CHECK(rep.mean_ratio.back() < 1.4);
  // Concentration tightens as n grows: the excess over the mean shrinks.
  for (size_t i = 1; i < rep.mean_ratio.size(); ++i)
    CHECK(rep.mean_ratio[i] < rep.mean_ratio[i - 1]);
  double lo = rep.theta_ratio[0], hi = rep.theta_ratio[0];
  for (double v : rep.theta_ratio) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 3.0);
  // Enlarging the support never lowers the crossing level.
  for (double s : rep.delta_slope) CHECK(s > 0.0);
}
