#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "flock/config.hpp"
#include "flock/geometry.hpp"
#include "flock/rng.hpp"
#include "flock/sweep.hpp"

using namespace flock;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SimConfig base_config() {
  SimConfig c;
  c.n = 80;
  c.d = 2;
  c.alpha = 2.0;
  c.vprime = 0.4;
  return c;
}

}  // namespace

TEST_CASE("config JSON round-trips exactly") {
  SimConfig c = base_config();
  std::string text = c.to_json_string();
  SimConfig back = SimConfig::from_json_string(text);
  CHECK(back.to_json_string() == text);

  Rng rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    SimConfig r;
    r.n = 10 + static_cast<int>(rng.next_u64() % 500);
    r.d = 2 + static_cast<int>(rng.next_u64() % 2);
    if (rng.next_u64() % 2)
      r.alpha = 0.5 + rng.next_double();
    else
      r.explicit_radius = 0.05 + 0.1 * rng.next_double();
    int fam = static_cast<int>(rng.next_u64() % 3);
    r.kernel_family =
        fam == 0 ? "indicator" : fam == 1 ? "triangular" : "power_cap";
    r.amplitude = 0.01 + rng.next_double();
    if (fam == 2) r.gamma = 0.5 + 2.0 * rng.next_double();
    if (rng.next_u64() % 3 == 0) r.delta = 0.25 * rng.next_double();
    int vm = static_cast<int>(rng.next_u64() % 3);
    if (vm == 0) {
      r.velocity_mode = "halfsplit";
      r.vprime = rng.next_double();
    } else if (vm == 1) {
      r.velocity_mode = "nearest_origin";
      r.v0 = 0.01 + rng.next_double();
    } else {
      r.velocity_mode = "zero";
    }
    r.t_max = 10 + static_cast<long>(rng.next_u64() % 10000);
    r.flock_tol = 1e-6;
    r.seed = rng.next_u64();
    r.trials = 1 + static_cast<int>(rng.next_u64() % 50);
    r.exact_pairs = rng.next_u64() % 2;
    r.spectral = rng.next_u64() % 2;
    r.drift = rng.next_u64() % 2 ? "off" : "exact";
    std::string t = r.to_json_string();
    CHECK(SimConfig::from_json_string(t).to_json_string() == t);
  }
}

TEST_CASE("config persists to disk and loads back") {
  SimConfig c = base_config();
  std::string path = "test_cli_config_tmp.json";
  persist_config(c, path);
  SimConfig back = load_config(path);
  CHECK(back.to_json_string() == c.to_json_string());
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("does_not_exist_anywhere.json"),
                  std::invalid_argument);
}

TEST_CASE("config validation rejects malformed documents with a located error") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      SimConfig::from_json_string(text);
      FAIL("expected a config error for: " << text);
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      CHECK(msg.rfind("config:", 0) == 0);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  std::string valid = base_config().to_json_string();
  expect_error("{", "parse");
  expect_error("[1,2]", "object");
  expect_error(R"({"schema_version": 99})", "schema_version");
  expect_error(R"({"schema_version": 1, "bogus": 1})", "unknown key 'bogus'");
  expect_error(
      R"({"schema_version": 1, "radius": {"alpha": 1, "r": 0.1},
          "velocity": {"mode": "zero"}})",
      "exactly one");
  expect_error(
      R"({"schema_version": 1, "velocity": {"mode": "zero"}})", "radius");
  expect_error(
      R"({"schema_version": 1, "radius": {"alpha": -2},
          "velocity": {"mode": "zero"}})",
      "positive");
  expect_error(
      R"({"schema_version": 1, "radius": {"alpha": 2},
          "velocity": {"mode": "halfsplit", "v0": 0.5}})",
      "vprime");
  expect_error(
      R"({"schema_version": 1, "radius": {"alpha": 2},
          "velocity": {"mode": "nearest_origin", "vprime": 0.5}})",
      "v0");
  expect_error(
      R"({"schema_version": 1, "radius": {"alpha": 2},
          "velocity": {"mode": "warp"}})",
      "unknown mode");
  expect_error(
      R"({"schema_version": 1, "radius": {"alpha": 2}, "n": 1,
          "velocity": {"mode": "zero"}})",
      "n");
  // The valid baseline parses.
  CHECK_NOTHROW(SimConfig::from_json_string(valid));
}

TEST_CASE("derived quantities follow the configured laws") {
  SimConfig c = base_config();
  CHECK(c.resolved_radius() ==
        doctest::Approx(radius_from_alpha(2.0, 80, 2)).epsilon(1e-15));
  c.explicit_radius = 0.123;
  c.alpha.reset();
  CHECK(c.resolved_radius() == 0.123);

  // Half-split speed scale v' n^{-3/2} sqrt(log n).
  SimConfig h = base_config();
  auto X = sample_positions(h.n, h.d, 5).X;
  Eigen::MatrixXd V = h.build_velocities(X);
  double expect = 0.4 * std::pow(80.0, -1.5) * std::sqrt(std::log(80.0));
  for (int i = 0; i < h.n; ++i) {
    CHECK(std::abs(V(i, 0)) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(V(i, 1) == 0.0);
    CHECK((V(i, 0) < 0.0) == (X(i, 0) <= 0.5));
  }

  // Default amplitude 1/(alpha pi log n) under the alpha law, d = 2.
  Kernel k = h.build_kernel();
  CHECK(k.amplitude() ==
        doctest::Approx(1.0 / (2.0 * M_PI * std::log(80.0))).epsilon(1e-15));
  CHECK(k.radius() == doctest::Approx(h.resolved_radius()).epsilon(1e-15));
}

TEST_CASE("log-spaced grids are geometric with inclusive endpoints") {
  auto g = log_spaced(0.2, 20.0, 8);
  REQUIRE(g.size() == 8);
  CHECK(g.front() == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(g.back() == doctest::Approx(20.0).epsilon(1e-14));
  for (size_t i = 1; i < g.size(); ++i)
    CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-12));
  CHECK_THROWS_AS(log_spaced(3.0, 3.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(log_spaced(-1.0, 3.0, 4), std::invalid_argument);
}

TEST_CASE("sweeps are deterministic across worker counts and CSV round-trips") {
  SweepSpec spec;
  spec.alpha_grid = {1.5, 2.5};
  spec.vprime_grid = {0.05, 2.0, 40.0};
  spec.trials = 4;
  spec.n = 60;
  spec.d = 2;
  spec.t_max = 250;
  spec.flock_tol = 1e-2;
  spec.seed = 11;
  spec.threads = 1;
  SweepResult one = run_sweep(spec);
  spec.threads = 3;
  SweepResult three = run_sweep(spec);
  REQUIRE(one.cells.size() == 6);
  REQUIRE(three.cells.size() == 6);
  for (size_t i = 0; i < one.cells.size(); ++i) {
    CHECK(one.cells[i].error.empty());
    CHECK(one.cells[i].flock_count == three.cells[i].flock_count);
    CHECK(one.cells[i].frequency == three.cells[i].frequency);
    CHECK(one.cells[i].mean_t_flock == three.cells[i].mean_t_flock);
    CHECK(one.cells[i].trials == 4);
    CHECK(one.cells[i].frequency >= 0.0);
    CHECK(one.cells[i].frequency <= 1.0);
  }
  CHECK(one.cell(1, 2).alpha_index == 1);
  CHECK(one.cell(1, 2).vprime_index == 2);

  persist_result(one, "sweep_a.csv", "sweep_a.json");
  persist_result(three, "sweep_b.csv", "sweep_b.json");
  CHECK(slurp("sweep_a.csv") == slurp("sweep_b.csv"));

  auto cells = load_sweep_csv("sweep_a.csv");
  REQUIRE(cells.size() == one.cells.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].alpha_index == one.cells[i].alpha_index);
    CHECK(cells[i].vprime_index == one.cells[i].vprime_index);
    CHECK(cells[i].frequency == one.cells[i].frequency);
    CHECK(cells[i].mean_t_flock == one.cells[i].mean_t_flock);
  }

  emit_plot(one, "sweep_a.svg");
  std::string svg = slurp("sweep_a.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  for (const char* f : {"sweep_a.csv", "sweep_a.json", "sweep_b.csv",
                        "sweep_b.json", "sweep_a.svg"})
    std::remove(f);
}

TEST_CASE("demarcation crossings interpolate between bracketing grid points") {
  SweepResult res;
  res.spec.alpha_grid = {2.0};
  res.spec.vprime_grid = {0.1, 1.0, 10.0};
  res.spec.trials = 10;
  auto mk = [](int ai, int vi, double freq) {
    SweepCell c;
    c.alpha_index = ai;
    c.vprime_index = vi;
    c.trials = 10;
    c.flock_count = static_cast<int>(freq * 10);
    c.frequency = freq;
    return c;
  };
  res.cells = {mk(0, 0, 1.0), mk(0, 1, 0.8), mk(0, 2, 0.0)};
  auto cross = res.demarcation(0);
  REQUIRE(cross.has_value());
  CHECK(cross->v_lo == 1.0);
  CHECK(cross->v_hi == 10.0);
  CHECK(cross->v_interp > 1.0);
  CHECK(cross->v_interp < 10.0);

  res.cells = {mk(0, 0, 0.2), mk(0, 1, 0.1), mk(0, 2, 0.0)};
  CHECK_FALSE(res.demarcation(0).has_value());
}
