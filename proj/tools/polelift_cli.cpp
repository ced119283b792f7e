// polelift: run scenarios and the standalone verification oracles.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "polelift/allocation.hpp"
#include "polelift/error.hpp"
#include "polelift/metrics.hpp"
#include "polelift/run_log.hpp"
#include "polelift/runner.hpp"
#include "polelift/scenario.hpp"
#include "polelift/voltage.hpp"

namespace pl = polelift;

namespace {

constexpr int kConfigError = 4;

int cmd_run(const std::vector<std::string>& scenarios, std::optional<std::uint64_t> seed, const std::string& out,
            int jobs) {
  std::vector<pl::ScenarioConfig> configs;
  for (const auto& path : scenarios) {
    try {
      configs.push_back(pl::load_scenario(path));
    } catch (const pl::ConfigError& e) {
      std::cerr << path << ": config error: " << e.what() << "\n";
      return kConfigError;
    }
    if (seed) configs.back().seed = *seed;
    if (!out.empty()) {
      configs.back().output_dir = scenarios.size() == 1 ? out : out + "/" + configs.back().name;
    }
  }
  std::set<std::string> dirs;
  for (const auto& c : configs) {
    if (!dirs.insert(c.output_dir).second) {
      std::cerr << "output directory '" << c.output_dir << "' used by more than one scenario\n";
      return kConfigError;
    }
  }

  std::vector<int> codes(configs.size(), 0);
  std::mutex io;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto& c = configs[i];
      const pl::RunResult r = pl::run_scenario(c);
      pl::write_outputs(c, r, c.output_dir);
      std::lock_guard lock(io);
      std::cout << c.name << ": " << pl::to_string(r.status) << " at t=" << r.end_time << " s";
      if (!r.message.empty()) std::cout << " (" << r.message << ")";
      std::cout << "\n";
      for (const auto& p : r.placements) {
        std::cout << "  pole " << p.pole << ": tip radial error " << p.tip_radial_error * 100.0 << " cm"
                  << (p.within_tolerance ? "" : "  OUTSIDE MOUNT TOLERANCE") << "\n";
      }
      std::cout << "  outputs: " << c.output_dir << "/log.csv, " << c.output_dir << "/summary.json\n";
      codes[i] = pl::exit_code(r.status);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

int cmd_verify_allocation(const std::string& path) {
  pl::ScenarioConfig c;
  try {
    c = pl::load_scenario(path);
  } catch (const pl::ConfigError& e) {
    std::cerr << path << ": config error: " << e.what() << "\n";
    return kConfigError;
  }
  const pl::AllocationMatrix a = pl::build_allocation_matrix(c.vehicle);
  const pl::RotorBounds bounds = pl::rotor_bounds(c.vehicle);
  const pl::RankReport rank = pl::analyze_rank(a);
  bool ok = rank.rank == 6 && rank.nullity == 2;
  std::cout << "singular values:";
  for (int i = 0; i < pl::kNumRotors; ++i) std::cout << " " << rank.singular_values(i);
  std::cout << "\nrank " << rank.rank << ", nullity " << rank.nullity << "\n";

  double heaviest = 0.0;
  if (c.mission) {
    for (const auto& p : c.mission->poles) heaviest = std::max(heaviest, p.pole.mass);
  } else if (c.flight && c.flight->payload) {
    heaviest = c.flight->payload->mass;
  }
  const double envelope = pl::actuation_envelope(a, bounds);
  std::cout << "thrust envelope " << envelope << " N, thrust-to-weight with heaviest payload ("
            << heaviest << " kg): " << envelope / ((c.vehicle.mass + heaviest) * c.vehicle.gravity) << "\n";

  double main_lateral = 0.0;
  for (int i = 0; i < pl::kNumRotors; ++i) {
    if (c.vehicle.propellers[i].rotor_class == pl::RotorClass::Main) {
      main_lateral = std::max(main_lateral, a.block<2, 1>(0, i).cwiseAbs().maxCoeff());
    }
  }
  std::cout << "max |main-rotor column| in f_x, f_y: " << main_lateral << "\n";

  // KKT spot check on random hover-neighbourhood wrenches.
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> f(-3.0, 3.0), tq(-0.5, 0.5);
  const double weight = c.vehicle.mass * c.vehicle.gravity;
  double worst = 0.0;
  double worst_slack = 0.0;
  for (int k = 0; k < 200; ++k) {
    pl::Wrench u;
    u << f(rng), f(rng), weight + 5.0 * f(rng), tq(rng), tq(rng), tq(rng);
    const pl::QpProblem qp = pl::build_qp(a, u, c.weights, bounds);
    const pl::QpSolution s = pl::solve_qp(qp);
    worst = std::max(worst, s.kkt.worst());
    worst_slack = std::max(worst_slack, s.slack(qp).norm() / std::max(1.0, u.norm()));
  }
  std::cout << "200 random QP instances: worst KKT residual " << worst << ", worst relative slack " << worst_slack
            << "\n";
  ok = ok && worst < 1e-8;
  std::cout << (ok ? "OK" : "FAILED") << "\n";
  return ok ? 0 : 1;
}

std::vector<pl::VoltageSample> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line != "speed,voltage,command") throw std::runtime_error("expected header 'speed,voltage,command'");
  std::vector<pl::VoltageSample> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    pl::VoltageSample s{};
    char c1 = 0, c2 = 0;
    if (!(ss >> s.speed >> c1 >> s.voltage >> c2 >> s.command) || c1 != ',' || c2 != ',') {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected three numbers");
    }
    out.push_back(s);
  }
  return out;
}

int cmd_fit_voltage(const std::string& path) {
  std::vector<pl::VoltageSample> samples;
  try {
    samples = read_samples(path);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kConfigError;
  }
  pl::VoltageMap map;
  try {
    map = pl::fit_voltage_map(samples);
  } catch (const std::invalid_argument& e) {
    std::cerr << "fit failed: " << e.what() << "\n";
    return 1;
  }
  double worst = 0.0;
  for (const auto& s : samples) {
    if (s.command <= 0.0) continue;
    const double cmd = pl::apply_voltage_compensation(map, s.speed, s.voltage).command;
    worst = std::max(worst, std::abs(cmd - s.command) / s.command);
  }
  nlohmann::ordered_json j;
  j["samples"] = samples.size();
  j["speed_scale"] = map.speed_scale;
  j["voltage_scale"] = map.voltage_scale;
  j["coefficients"] = map.coeffs;
  j["max_abs_residual"] = map.max_residual;
  j["max_relative_roundtrip_error"] = worst;
  std::cout << j.dump(2) << "\n";
  return worst < 0.01 ? 0 : 1;
}

int cmd_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read '" << path << "'\n";
    return kConfigError;
  }
  std::vector<pl::LogRow> rows;
  try {
    rows = pl::read_log(in);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kConfigError;
  }
  pl::MetricsRecorder rec;
  double mismatch = 0.0;
  for (const auto& r : rows) {
    const pl::RecomputedErrors e = pl::recompute_errors(r);
    mismatch = std::max({mismatch, std::abs(e.radial - r.radial_error), std::abs(e.tip_radial - r.tip_radial_error)});
    const Eigen::Quaterniond q(r.quaternion(0), r.quaternion(1), r.quaternion(2), r.quaternion(3));
    const pl::Mat3 rel = pl::RotationMatrix::about_z(r.yaw_des).transpose() *
                         pl::RotationMatrix::from_quaternion(q).matrix();
    rec.add({r.t, r.phase, e.radial, e.tip_radial, std::abs(pl::roll_of(rel)), std::abs(pl::pitch_of(rel))});
  }
  constexpr double deg = 180.0 / 3.14159265358979323846;
  auto block = [&](const pl::PhaseAggregates& p) {
    return nlohmann::ordered_json{{"samples", p.radial.count},
                                  {"radial_error_m", {{"mean", p.radial.mean}, {"max", p.radial.max}}},
                                  {"tip_radial_error_m", {{"mean", p.tip_radial.mean}, {"max", p.tip_radial.max}}},
                                  {"roll_error_deg", {{"mean", p.roll.mean * deg}, {"max", p.roll.max * deg}}},
                                  {"pitch_error_deg", {{"mean", p.pitch.mean * deg}, {"max", p.pitch.max * deg}}}};
  };
  nlohmann::ordered_json j;
  j["rows"] = rows.size();
  j["max_recompute_mismatch"] = mismatch;
  for (const auto& [name, agg] : rec.per_phase()) j["phases"][name] = block(agg);
  j["overall"] = block(rec.overall());
  std::cout << j.dump(2) << "\n";
  return mismatch <= 1e-12 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polelift: pole-transport octocopter simulator"};
  app.require_subcommand(1);

  std::vector<std::string> scenarios;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "Simulate one or more scenarios");
  run->add_option("--scenario", scenarios, "Scenario file (repeat for a batch)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Output directory (per-scenario subdirectories in batch mode)");
  run->add_option("--jobs", jobs, "Concurrent runs in batch mode")->check(CLI::PositiveNumber);

  std::string alloc_path;
  auto* verify = app.add_subcommand("verify-allocation", "Rank, thrust envelope and QP optimality checks");
  verify->add_option("--scenario", alloc_path, "Scenario file")->required()->check(CLI::ExistingFile);

  std::string samples_path;
  auto* fit = app.add_subcommand("fit-voltage", "Fit the voltage-compensation polynomial to ESC samples");
  fit->add_option("--samples", samples_path, "CSV with header speed,voltage,command")->required()->check(CLI::ExistingFile);

  std::string log_path;
  auto* metrics = app.add_subcommand("metrics", "Recompute metrics from a run log");
  metrics->add_option("--log", log_path, "log.csv from a run")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(scenarios, seed, out, jobs);
    if (*verify) return cmd_verify_allocation(alloc_path);
    if (*fit) return cmd_fit_voltage(samples_path);
    if (*metrics) return cmd_metrics(log_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
