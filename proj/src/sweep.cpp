#include "flock/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "flock/dynamics.hpp"
#include "flock/geometry.hpp"
#include "flock/rng.hpp"

namespace flock {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

SweepCell run_cell(const SweepSpec& spec, int ai, int vi) {
  SweepCell cell;
  cell.alpha_index = ai;
  cell.vprime_index = vi;
  cell.trials = spec.trials;
  try {
    double alpha = spec.alpha_grid[ai];
    SimConfig cfg;
    cfg.n = spec.n;
    cfg.d = spec.d;
    cfg.alpha = alpha;
    cfg.kernel_family = spec.kernel_family;
    cfg.amplitude = spec.amplitude;
    cfg.gamma = spec.gamma;
    cfg.velocity_mode = "halfsplit";
    cfg.vprime = spec.vprime_grid[vi];
    cfg.t_max = spec.t_max;
    cfg.flock_tol = spec.flock_tol;
    cfg.drift = "off";
    cfg.spectral = false;

    long t_sum = 0;
    for (int t = 0; t < spec.trials; ++t) {
      std::uint64_t s = split_seed(spec.seed, ai, vi, t);
      auto sample = sample_positions(spec.n, spec.d, s);
      RunConfig run = cfg.build_run(sample.X, split_seed(s, 1));
      RunReport rep = simulate(run);
      if (rep.flocked) {
        ++cell.flock_count;
        t_sum += rep.t_flock.value_or(rep.steps);
      }
    }
    cell.frequency = static_cast<double>(cell.flock_count) / spec.trials;
    cell.mean_t_flock =
        cell.flock_count ? static_cast<double>(t_sum) / cell.flock_count : 0.0;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

const SweepCell& SweepResult::cell(int ai, int vi) const {
  return cells[static_cast<std::size_t>(ai) * spec.vprime_grid.size() + vi];
}

std::optional<SweepResult::Crossing> SweepResult::demarcation(int ai) const {
  int nv = static_cast<int>(spec.vprime_grid.size());
  for (int vi = 0; vi + 1 < nv; ++vi) {
    double f0 = cell(ai, vi).frequency;
    double f1 = cell(ai, vi + 1).frequency;
    if ((f0 - 0.5) * (f1 - 0.5) <= 0.0 && f0 != f1) {
      Crossing c;
      c.v_lo = spec.vprime_grid[vi];
      c.v_hi = spec.vprime_grid[vi + 1];
      // Interpolate in log v, the grid's natural coordinate.
      double w = (0.5 - f0) / (f1 - f0);
      c.v_interp = std::exp(std::log(c.v_lo) +
                            w * (std::log(c.v_hi) - std::log(c.v_lo)));
      return c;
    }
  }
  return std::nullopt;
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.alpha_grid.empty() || spec.vprime_grid.empty())
    throw std::invalid_argument("run_sweep: empty grid");
  for (double a : spec.alpha_grid)
    if (!(a > 0.0)) throw std::invalid_argument("run_sweep: alpha must be > 0");

  SweepResult result;
  result.spec = spec;
  int na = static_cast<int>(spec.alpha_grid.size());
  int nv = static_cast<int>(spec.vprime_grid.size());
  result.cells.resize(static_cast<std::size_t>(na) * nv);

  std::atomic<int> next{0};
  int total = na * nv;
  auto worker = [&] {
    for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1))
      result.cells[idx] = run_cell(spec, idx / nv, idx % nv);
  };
  int threads = std::max(1, spec.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

void persist_result(const SweepResult& result, const std::string& csv_path,
                    const std::string& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::invalid_argument("cannot write " + csv_path);
  csv << "alpha_index,vprime_index,alpha,vprime,trials,flock_count,"
         "frequency,mean_t_flock,error\n";
  for (const auto& c : result.cells) {
    csv << c.alpha_index << ',' << c.vprime_index << ','
        << fmt_double(result.spec.alpha_grid[c.alpha_index]) << ','
        << fmt_double(result.spec.vprime_grid[c.vprime_index]) << ','
        << c.trials << ',' << c.flock_count << ',' << fmt_double(c.frequency)
        << ',' << fmt_double(c.mean_t_flock) << ',' << c.error << '\n';
  }

  nlohmann::json meta;
  meta["n"] = result.spec.n;
  meta["d"] = result.spec.d;
  meta["kernel_family"] = result.spec.kernel_family;
  meta["trials"] = result.spec.trials;
  meta["seed"] = result.spec.seed;
  meta["alpha_grid"] = result.spec.alpha_grid;
  meta["vprime_grid"] = result.spec.vprime_grid;
  meta["t_max"] = result.spec.t_max;
  meta["flock_tol"] = result.spec.flock_tol;
  meta["code_version"] = "1.0.0";
  std::ofstream js(json_path);
  if (!js) throw std::invalid_argument("cannot write " + json_path);
  js << meta.dump(2) << "\n";
}

std::vector<SweepCell> load_sweep_csv(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::invalid_argument("cannot open " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<SweepCell> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 9) fields.emplace_back();
    SweepCell c;
    c.alpha_index = std::stoi(fields[0]);
    c.vprime_index = std::stoi(fields[1]);
    c.trials = std::stoi(fields[4]);
    c.flock_count = std::stoi(fields[5]);
    c.frequency = std::stod(fields[6]);
    c.mean_t_flock = std::stod(fields[7]);
    c.error = fields[8];
    cells.push_back(c);
  }
  return cells;
}

void emit_plot(const SweepResult& result, const std::string& svg_path) {
  int na = static_cast<int>(result.spec.alpha_grid.size());
  int nv = static_cast<int>(result.spec.vprime_grid.size());
  const int cw = 36, ch = 18, mx = 60, my = 30;
  int width = mx + na * cw + 20;
  int height = my + nv * ch + 40;

  std::ofstream svg(svg_path);
  if (!svg) throw std::invalid_argument("cannot write " + svg_path);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Cells: row vi = 0 (smallest v') at the bottom.
  for (const auto& c : result.cells) {
    int x = mx + c.alpha_index * cw;
    int y = my + (nv - 1 - c.vprime_index) * ch;
    int red = static_cast<int>(std::lround(255 * (1.0 - c.frequency)));
    int blue = static_cast<int>(std::lround(255 * c.frequency));
    svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw
        << "\" height=\"" << ch << "\" fill=\"rgb(" << red << ",64," << blue
        << ")\"/>\n";
  }

  // Frequency-0.5 demarcation, interpolated per alpha column.
  std::vector<std::pair<double, double>> pts;
  for (int ai = 0; ai < na; ++ai) {
    auto cross = result.demarcation(ai);
    if (!cross) continue;
    double lv = std::log(result.spec.vprime_grid.front());
    double hv = std::log(result.spec.vprime_grid.back());
    double frac = hv > lv ? (std::log(cross->v_interp) - lv) / (hv - lv) : 0.5;
    pts.emplace_back(mx + (ai + 0.5) * cw,
                     my + (nv - 0.5) * ch - frac * (nv - 1) * ch);
  }
  if (pts.size() >= 2) {
    svg << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" "
           "points=\"";
    for (auto& [x, y] : pts) svg << x << ',' << y << ' ';
    svg << "\"/>\n";
  }

  for (int ai = 0; ai < na; ++ai)
    svg << "<text x=\"" << mx + ai * cw + cw / 2 << "\" y=\""
        << my + nv * ch + 16
        << "\" font-size=\"10\" text-anchor=\"middle\">"
        << result.spec.alpha_grid[ai] << "</text>\n";
  svg << "<text x=\"" << mx + na * cw / 2 << "\" y=\"" << my + nv * ch + 32
      << "\" font-size=\"11\" text-anchor=\"middle\">alpha</text>\n";
  svg << "<text x=\"14\" y=\"" << my + nv * ch / 2
      << "\" font-size=\"11\" transform=\"rotate(-90 14 " << my + nv * ch / 2
      << ")\" text-anchor=\"middle\">v' (log scale)</text>\n";
  svg << "<text x=\"" << mx << "\" y=\"18\" font-size=\"11\">flocking "
         "frequency (blue = 1, red = 0)</text>\n";
  svg << "</svg>\n";
}

std::vector<double> log_spaced(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw std::invalid_argument("log_spaced: need 0 < lo < hi, points >= 2");
  std::vector<double> grid(points);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    grid[i] = std::exp(llo + (lhi - llo) * i / (points - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace flock
