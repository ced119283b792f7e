// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "polelift/allocation.hpp"
#include "polelift/dynamics.hpp"
#include "polelift/gripper.hpp"
#include "polelift/runner.hpp"
#include "polelift/vehicle.hpp"
#include "polelift/voltage.hpp"
#include "support/oracles.hpp"
#include "support/qp_reference.hpp"

using namespace polelift;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (wall > budget_s) {
    v.pass = false;
    v.detail += " [over runtime budget]";
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %2d %-34s %s (%.2f s / %.0f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), wall,
              budget_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ScenarioConfig scenario(const std::string& name) {
  return load_scenario(std::string(POLELIFT_SOURCE_DIR) + "/scenarios/" + name);
}

RotorVector random_box_point(std::mt19937_64& rng, const RotorBounds& b) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RotorVector w;
  for (int i = 0; i < kNumRotors; ++i) w(i) = b.w_min(i) + u(rng) * (b.w_max(i) - b.w_min(i));
  return w;
}

double max_abs_altitude_error(const RunResult& r) {
  double worst = 0.0;
  for (const auto& row : r.log) worst = std::max(worst, std::abs(row.position.z() - row.position_des.z()));
  return worst;
}

}  // namespace

int main() {
  const VehicleParams vehicle = reference_vehicle();
  const AllocationMatrix a = build_allocation_matrix(vehicle);
  const RotorBounds bounds = rotor_bounds(vehicle);

  criterion(1, "Allocation structure", 1.0, [&] {
    const RankReport r = analyze_rank(a);
    const double smax = r.singular_values(0);
    int above = 0;
    for (int i = 0; i < kNumRotors; ++i) above += r.singular_values(i) > 1e-8 * smax;
    const bool ok = r.rank == 6 && r.nullity == 2 && above == 6 && (a * r.null_basis).norm() < 1e-12 * a.norm();
    return Verdict{ok, "rank=" + std::to_string(r.rank) + " nullity=" + std::to_string(r.nullity) +
                           " sigma_min/sigma_max=" + fmt("%.3g", r.singular_values(5) / smax)};
  });

  criterion(2, "Thrust-to-weight", 1.0, [&] {
    const double tw = actuation_envelope(a, bounds) / ((8.26 + 3.00) * 9.81);
    return Verdict{std::abs(tw - 1.61) <= 0.02, "T/W=" + fmt("%.4f", tw)};
  });

  criterion(3, "QP optimality (1000 instances)", 30.0, [&] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> stretch(1.0, 2.5);
    double worst_kkt = 0.0, worst_obj = 0.0;
    int saturated = 0;
    for (int k = 0; k < 1000; ++k) {
      Wrench u = a * random_box_point(rng, bounds);
      if (k % 5 == 4) {
        u *= stretch(rng);  // pushes past the envelope: slack and many bounds active
        ++saturated;
      }
      const QpProblem p = build_qp(a, u, AllocationWeights{}, bounds);
      const QpSolution s = solve_qp(p);
      const auto ref = oracle::solve_dual_variable_metric(p.constraint, p.weights, p.lower, p.upper, p.target);
      const double f = p.objective(s.y);
      worst_kkt = std::max(worst_kkt, s.kkt.worst());
      worst_obj = std::max(worst_obj, std::abs(f - ref.dual_value) / std::abs(f));
    }
    return Verdict{worst_kkt < 1e-8 && worst_obj < 1e-6,
                   "max KKT=" + fmt("%.2e", worst_kkt) + " max rel objective gap=" + fmt("%.2e", worst_obj) + " (" +
                       std::to_string(saturated) + " beyond envelope)"};
  });

  criterion(4, "Slack dormancy", 60.0, [&] {
    std::mt19937_64 rng(7);
    AllocationSolver solver;
    double worst_inside = 0.0, worst_outside = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const Wrench u = a * random_box_point(rng, bounds);
      const QpProblem p = build_qp(a, u, AllocationWeights{}, bounds);
      const QpSolution s = solver.solve(p);
      worst_inside = std::max(worst_inside, s.slack(p).norm() / std::max(1.0, u.norm()));
    }
    for (int k = 0; k < 1000; ++k) {
      const Wrench u = 2.0 * (a * random_box_point(rng, bounds));
      const QpProblem p = build_qp(a, u, AllocationWeights{}, bounds);
      const QpSolution s = solver.solve(p);
      worst_outside = std::max(worst_outside, (a * s.actuators(p) - (u - s.slack(p))).norm());
    }
    return Verdict{worst_inside <= 1e-6 && worst_outside < 1e-9,
                   "inside: max |delta|/max(1,|u|)=" + fmt("%.2e", worst_inside) +
                       "; 2x envelope: max |Aw-(u-delta)|=" + fmt("%.2e", worst_outside)};
  });

  RunResult hover;
  bool hover_ran = false;
  criterion(5, "Hover precision with pole", 120.0, [&] {
    const ScenarioConfig c = scenario("hover_pole.yaml");
    if (!c.noise.enabled || !c.flight || !c.flight->payload || c.flight->payload->length != 2.0 ||
        c.flight->payload->mass != 3.0) {
      return Verdict{false, "hover scenario is not the 2 m / 3 kg pole with noise"};
    }
    hover = run_scenario(c);
    hover_ran = true;
    const auto& m = hover.metrics.overall();
    const double duration = hover.end_time;
    const bool ok = hover.status == RunStatus::Success && duration >= 60.0 - 1e-9 && m.radial.mean < 0.03 &&
                    m.tip_radial.mean < 0.035 && m.radial.max < 0.05 && m.tip_radial.max < 0.05;
    return Verdict{ok, "over " + fmt("%.0f s", duration) + ": e_r mean/max=" + fmt("%.2f", m.radial.mean * 100) + "/" +
                           fmt("%.2f cm", m.radial.max * 100) + ", tip mean/max=" + fmt("%.2f", m.tip_radial.mean * 100) +
                           "/" + fmt("%.2f cm", m.tip_radial.max * 100)};
  });

  criterion(6, "Attitude precision", 1.0, [&] {
    if (!hover_ran) return Verdict{false, "hover run missing"};
    const auto& m = hover.metrics.overall();
    constexpr double deg = 180.0 / M_PI;
    const bool ok = m.roll.mean * deg < 1.0 && m.pitch.mean * deg < 1.0 && m.roll.max * deg < 3.0 &&
                    m.pitch.max * deg < 3.0;
    return Verdict{ok, "roll mean/max=" + fmt("%.3f", m.roll.mean * deg) + "/" + fmt("%.3f deg", m.roll.max * deg) +
                           ", pitch mean/max=" + fmt("%.3f", m.pitch.mean * deg) + "/" +
                           fmt("%.3f deg", m.pitch.max * deg)};
  });

  criterion(7, "Flat lateral translation", 60.0, [&] {
    const ScenarioConfig c = scenario("lateral_step.yaml");
    const Vec3 step = c.flight->waypoints.front().position - c.flight->start;
    const RunResult r = run_scenario(c);
    double peak_tilt = 0.0, main_lateral = 0.0, aux_lateral = 0.0;
    for (const auto& row : r.log) {
      const Mat3 rot = RotationMatrix::from_quaternion(
                           Eigen::Quaterniond(row.quaternion(0), row.quaternion(1), row.quaternion(2), row.quaternion(3)))
                           .matrix();
      peak_tilt = std::max({peak_tilt, std::abs(roll_of(rot)), std::abs(pitch_of(rot))});
      const Eigen::Vector2d from_main = a.block<2, kNumMain>(0, 0) * row.w_act.head<kNumMain>();
      const Eigen::Vector2d from_aux = a.block<2, 4>(0, kNumMain) * row.w_act.tail<4>();
      main_lateral = std::max(main_lateral, from_main.norm());
      aux_lateral = std::max(aux_lateral, from_aux.norm());
    }
    const double moved = (r.log.back().position - c.flight->start).dot(step.normalized());
    constexpr double deg = 180.0 / M_PI;
    const bool ok = r.status == RunStatus::Success && std::abs(step.norm() - 1.0) < 1e-12 && step.z() == 0.0 &&
                    peak_tilt * deg < 2.0 && main_lateral == 0.0 && aux_lateral > 0.0 &&
                    std::abs(moved - 1.0) < 0.01;
    return Verdict{ok, "peak tilt=" + fmt("%.4f deg", peak_tilt * deg) + ", main f_xy=" + fmt("%.1g N", main_lateral) +
                           ", aux f_xy peak=" + fmt("%.2f N", aux_lateral) + ", moved " + fmt("%.4f m", moved)};
  });

  criterion(8, "End-to-end demonstration", 300.0, [&] {
    const RunResult r = run_scenario(scenario("demo_two_poles.yaml"));
    bool ok = r.status == RunStatus::Success && r.placements.size() == 2 && r.end_time < 360.0;
    std::string tips;
    for (const auto& p : r.placements) {
      ok = ok && p.tip_radial_error < 0.05;
      tips += fmt(" %.3f cm", p.tip_radial_error * 100);
    }
    return Verdict{ok, to_string(r.status) + " in " + fmt("%.1f s", r.end_time) + ", tip errors:" + tips};
  });

  criterion(9, "Self-locking statics", 5.0, [&] {
    int cases = 0, mismatches = 0, not_invariant = 0;
    double worst_residual = 0.0;
    for (int i = 1; i <= 60; ++i) {
      for (int j = 1; j <= 60; ++j) {
        GripperGeometry g;
        g.friction_coeff = 0.025 * i;           // 0.025 .. 1.5
        g.fold_angle = (j * 1.0) * M_PI / 180;  // 1 .. 60 deg
        const bool expect = g.friction_coeff >= std::tan(g.fold_angle);
        for (double weight : {29.43, 29.43e6}) {
          ++cases;
          bool ok = true;
          LiftingStatics s;
          try {
            s = lifting_statics(g, weight);
          } catch (const std::domain_error&) {
            ok = false;
          }
          if (ok != expect) ++mismatches;
          if (ok) {
            const Vec3 sum = s.friction_sum + s.normal_sum + Vec3(0, 0, -weight);
            worst_residual = std::max(worst_residual, sum.norm() / weight);
          }
        }
        bool light = true, heavy = true;
        try { lifting_statics(g, 1.0); } catch (const std::domain_error&) { light = false; }
        try { lifting_statics(g, 1e6); } catch (const std::domain_error&) { heavy = false; }
        if (light != heavy) ++not_invariant;
      }
    }
    return Verdict{mismatches == 0 && not_invariant == 0 && worst_residual < 1e-12,
                   std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches vs mu>=tan(alpha), " +
                       std::to_string(not_invariant) + " scale-dependent, max residual=" + fmt("%.1e", worst_residual)};
  });

  criterion(10, "Payload composition oracle", 60.0, [&] {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> um(0.5, 5.0), ul(0.5, 3.0), ur(0.04, 0.1), ud(0.02, 0.3), sign(-1, 1);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      PayloadSpec p;
      p.mass = um(rng);
      p.length = ul(rng);
      p.radius = ur(rng);
      for (int i = 0; i < 3; ++i) p.grasp_offset(i) = ud(rng) * (sign(rng) < 0 ? -1.0 : 1.0);
      p.inertia_com = tube_inertia(p.mass, p.length, p.radius);
      const Mat3 added = compose_payload(vehicle, p).inertia - vehicle.inertia;
      const auto cloud = oracle::tube_point_cloud(p.mass, p.length, p.radius, p.grasp_offset, 400, 250);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          worst = std::max(worst, std::abs(added(i, j) - cloud.inertia(i, j)) / std::abs(cloud.inertia(i, j)));
        }
      }
    }
    return Verdict{worst < 0.005, "max relative entry error=" + fmt("%.2e", worst) + " (10^5 points, 20 tubes)"};
  });

  criterion(11, "Conservation and RK4 order", 30.0, [&] {
    VehicleParams p = vehicle;
    p.gravity = 0.0;
    p.inertia << 0.45, 0.02, -0.01, 0.02, 0.52, 0.03, -0.01, 0.03, 0.80;
    RigidState s;
    s.attitude = rotation_exp(Vec3(0.3, -0.2, 0.9), 1.0);
    s.velocity_body = {0.4, -0.1, 0.2};
    s.angular_velocity = {1.5, -0.7, 2.0};
    const Vec3 lin0 = p.mass * s.velocity_world();
    const Vec3 ang0 = s.attitude * (p.inertia * s.angular_velocity);
    const double t_end = 10.0;
    for (int i = 0; i < 10000; ++i) s = rk4_step(s, p, Wrench::Zero(), 0.001);
    const double dl = (p.mass * s.velocity_world() - lin0).norm() / t_end;
    const double da = (s.attitude * (p.inertia * s.angular_velocity) - ang0).norm() / t_end;

    Wrench u;
    u << 0.5, -0.3, 1.0, 0.3, -0.2, 0.4;
    auto spin_up = [&](double dt) {
      RigidState x;
      const int n = static_cast<int>(std::lround(1.0 / dt));
      for (int i = 0; i < n; ++i) x = rk4_step(x, p, u, dt);
      return x;
    };
    auto dist = [](const RigidState& x, const RigidState& y) {
      return (x.position - y.position).norm() + (x.attitude.matrix() - y.attitude.matrix()).norm() +
             (x.velocity_body - y.velocity_body).norm() + (x.angular_velocity - y.angular_velocity).norm();
    };
    const RigidState ref = spin_up(1.0 / 6400);
    const double e1 = dist(spin_up(0.02), ref), e2 = dist(spin_up(0.01), ref), e3 = dist(spin_up(0.005), ref);
    const double order = std::min(std::log2(e1 / e2), std::log2(e2 / e3));
    return Verdict{dl < 1e-9 && da < 1e-9 && order >= 3.8,
                   "momentum drift lin/ang=" + fmt("%.1e", dl) + "/" + fmt("%.1e per s", da) + ", observed order=" +
                       fmt("%.2f", order)};
  });

  criterion(12, "Voltage compensation round trip", 240.0, [&] {
    double worst = 0.0;
    for (double w_max : {5.55e5, 4.4e6}) {
      const double rated = std::sqrt(w_max);
      const auto samples = synthetic_voltage_samples(rated, 24.0, 20.0, 25.5);
      const VoltageMap map = fit_voltage_map(samples);
      for (const auto& s : samples) {
        const double cmd = apply_voltage_compensation(map, s.speed, s.voltage).command;
        worst = std::max(worst, std::abs(cmd - s.command) / s.command);
      }
    }
    ScenarioConfig c = scenario("hover_pole.yaml");
    c.noise.enabled = false;
    c.voltage.enabled = true;
    const RunResult comp = run_scenario(c);
    c.voltage.enabled = false;
    const RunResult raw = run_scenario(c);
    const double e_comp = max_abs_altitude_error(comp), e_raw = max_abs_altitude_error(raw);
    const double sag = comp.log.front().voltage - comp.log.back().voltage;
    const bool ok = worst < 0.01 && e_comp < 0.01 && e_raw > 0.05 && sag > 0.0;
    return Verdict{ok, "fit round trip max=" + fmt("%.3f%%", worst * 100) + "; battery sag " + fmt("%.2f V", sag) +
                           ": altitude error compensated=" + fmt("%.2f cm", e_comp * 100) +
                           " uncompensated=" + fmt("%.2f cm", e_raw * 100)};
  });

  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
