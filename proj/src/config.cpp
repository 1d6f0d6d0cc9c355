#include "flock/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "flock/conditions.hpp"
#include "flock/geometry.hpp"

namespace flock {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

[[noreturn]] void config_error(const std::string& where,
                               const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) known = true;
    if (!known) config_error(where, "unknown key '" + it.key() + "'");
  }
}

}  // namespace

double SimConfig::resolved_radius() const {
  if (explicit_radius) return *explicit_radius;
  return radius_from_alpha(*alpha, n, d);
}

Kernel SimConfig::build_kernel() const {
  double r = resolved_radius();
  double b;
  if (amplitude) {
    b = *amplitude;
  } else {
    if (!alpha)
      config_error("kernel.amplitude",
                   "default amplitude 1/(alpha pi log n) needs the alpha "
                   "radius law");
    if (d != 2)
      config_error("kernel.amplitude",
                   "default amplitude is defined for d = 2 only");
    b = 1.0 / (*alpha * M_PI * std::log(static_cast<double>(n)));
  }
  Kernel base = [&] {
    if (kernel_family == "indicator") return Kernel::indicator(b, r);
    if (kernel_family == "triangular") return Kernel::triangular(b, r);
    if (kernel_family == "power_cap") return Kernel::power_cap(b, r, gamma);
    if (kernel_family == "tabulated") return Kernel::tabulated(samples, r);
    config_error("kernel.family", "unknown family '" + kernel_family + "'");
  }();
  return delta > 0.0 ? base.shifted(delta) : base;
}

Eigen::MatrixXd SimConfig::build_velocities(const Eigen::MatrixXd& X) const {
  if (velocity_mode == "zero")
    return Eigen::MatrixXd::Zero(X.rows(), X.cols());
  if (velocity_mode == "explicit") {
    Eigen::MatrixXd V(v_explicit.size(), d);
    for (int i = 0; i < static_cast<int>(v_explicit.size()); ++i)
      for (int j = 0; j < d; ++j) V(i, j) = v_explicit[i][j];
    return V;
  }
  if (velocity_mode == "nearest_origin")
    return adversarial_velocities(X, VelocityMode::NearestOrigin, *v0);
  double scale;
  if (velocity_mode == "halfsplit") {
    scale = *vprime * std::pow(static_cast<double>(n), -1.5) *
            std::sqrt(std::log(static_cast<double>(n)));
  } else {  // halfsplit_abs
    scale = *v0;
  }
  return adversarial_velocities(X, VelocityMode::HalfSplit, scale);
}

RunConfig SimConfig::build_run(const Eigen::MatrixXd& X,
                               std::uint64_t run_seed) const {
  RunConfig cfg;
  cfg.kernel = build_kernel();
  cfg.X0 = X;
  cfg.V0 = build_velocities(X);
  cfg.t_max = t_max;
  cfg.flock_tol = flock_tol;
  cfg.exact_pairs = exact_pairs;
  cfg.record_series = spectral;
  cfg.drift_mode = drift == "off"     ? DriftMode::Off
                   : drift == "exact" ? DriftMode::Exact
                                      : DriftMode::Sampled;
  cfg.seed = run_seed;
  return cfg;
}

std::string SimConfig::to_json_string() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = n;
  j["d"] = d;
  if (alpha) j["radius"] = {{"alpha", *alpha}};
  if (explicit_radius) j["radius"] = {{"r", *explicit_radius}};

  json jk;
  jk["family"] = kernel_family;
  if (amplitude) jk["amplitude"] = *amplitude;
  if (kernel_family == "power_cap") jk["gamma"] = gamma;
  if (delta != 0.0) jk["delta"] = delta;
  if (kernel_family == "tabulated") jk["samples"] = samples;
  j["kernel"] = jk;

  json jv;
  jv["mode"] = velocity_mode;
  if (vprime) jv["vprime"] = *vprime;
  if (v0) jv["v0"] = *v0;
  if (velocity_mode == "explicit") jv["matrix"] = v_explicit;
  j["velocity"] = jv;

  j["t_max"] = t_max;
  j["flock_tol"] = flock_tol;
  j["seed"] = seed;
  j["trials"] = trials;
  j["exact_pairs"] = exact_pairs;
  j["spectral"] = spectral;
  j["drift"] = drift;
  return j.dump(2) + "\n";
}

SimConfig SimConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("parse", e.what());
  }
  if (!j.is_object()) config_error("root", "expected an object");
  reject_unknown(j, "root",
                 {"schema_version", "n", "d", "radius", "kernel", "velocity",
                  "t_max", "flock_tol", "seed", "trials", "exact_pairs",
                  "spectral", "drift"});
  if (!j.contains("schema_version") ||
      j["schema_version"].get<int>() != kSchemaVersion)
    config_error("schema_version", "missing or unsupported (expected 1)");

  SimConfig c;
  if (j.contains("n")) c.n = j["n"].get<int>();
  if (j.contains("d")) c.d = j["d"].get<int>();
  if (c.n < 2) config_error("n", "must be >= 2");
  if (c.d < 2) config_error("d", "must be >= 2");

  if (!j.contains("radius")) config_error("radius", "required");
  const json& jr = j["radius"];
  reject_unknown(jr, "radius", {"alpha", "r"});
  if (jr.contains("alpha") == jr.contains("r"))
    config_error("radius", "exactly one of 'alpha' or 'r' required");
  if (jr.contains("alpha")) c.alpha = jr["alpha"].get<double>();
  if (jr.contains("r")) c.explicit_radius = jr["r"].get<double>();
  if ((c.alpha && *c.alpha <= 0.0) ||
      (c.explicit_radius && *c.explicit_radius <= 0.0))
    config_error("radius", "must be positive");

  if (j.contains("kernel")) {
    const json& jk = j["kernel"];
    reject_unknown(jk, "kernel",
                   {"family", "amplitude", "gamma", "delta", "samples"});
    if (jk.contains("family")) c.kernel_family = jk["family"].get<std::string>();
    if (jk.contains("amplitude")) c.amplitude = jk["amplitude"].get<double>();
    if (jk.contains("gamma")) c.gamma = jk["gamma"].get<double>();
    if (jk.contains("delta")) c.delta = jk["delta"].get<double>();
    if (jk.contains("samples"))
      c.samples = jk["samples"].get<std::vector<double>>();
    if (c.delta < 0.0) config_error("kernel.delta", "must be >= 0");
  }

  if (!j.contains("velocity")) config_error("velocity", "required");
  const json& jv = j["velocity"];
  reject_unknown(jv, "velocity", {"mode", "vprime", "v0", "matrix"});
  if (!jv.contains("mode")) config_error("velocity.mode", "required");
  c.velocity_mode = jv["mode"].get<std::string>();
  if (jv.contains("vprime")) c.vprime = jv["vprime"].get<double>();
  if (jv.contains("v0")) c.v0 = jv["v0"].get<double>();
  if (c.velocity_mode == "halfsplit") {
    if (!c.vprime || c.v0)
      config_error("velocity", "halfsplit takes 'vprime' only");
  } else if (c.velocity_mode == "halfsplit_abs" ||
             c.velocity_mode == "nearest_origin") {
    if (!c.v0 || c.vprime)
      config_error("velocity", c.velocity_mode + " takes 'v0' only");
  } else if (c.velocity_mode == "explicit") {
    if (!jv.contains("matrix"))
      config_error("velocity.matrix", "required for explicit mode");
    c.v_explicit = jv["matrix"].get<std::vector<std::vector<double>>>();
    if (static_cast<int>(c.v_explicit.size()) != c.n)
      config_error("velocity.matrix", "row count must equal n");
    for (const auto& row : c.v_explicit)
      if (static_cast<int>(row.size()) != c.d)
        config_error("velocity.matrix", "every row must have d entries");
  } else if (c.velocity_mode != "zero") {
    config_error("velocity.mode", "unknown mode '" + c.velocity_mode + "'");
  }

  if (j.contains("t_max")) c.t_max = j["t_max"].get<long>();
  if (j.contains("flock_tol")) c.flock_tol = j["flock_tol"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("trials")) c.trials = j["trials"].get<int>();
  if (j.contains("exact_pairs")) c.exact_pairs = j["exact_pairs"].get<bool>();
  if (j.contains("spectral")) c.spectral = j["spectral"].get<bool>();
  if (j.contains("drift")) c.drift = j["drift"].get<std::string>();
  if (c.t_max < 0) config_error("t_max", "must be >= 0");
  if (c.trials < 1) config_error("trials", "must be >= 1");
  if (c.drift != "off" && c.drift != "sampled" && c.drift != "exact")
    config_error("drift", "must be off, sampled, or exact");
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return SimConfig::from_json_string(buf.str());
}

void persist_config(const SimConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("config: cannot write " + path);
  out << config.to_json_string();
}

}  // namespace flock
