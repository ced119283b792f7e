#include "polelift/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

#include "polelift/allocation.hpp"
#include "polelift/error.hpp"
#include "polelift/voltage.hpp"

namespace polelift {

namespace {

// Waypoint follower for scenarios without the gripper.
class FlightPlanner {
 public:
  explicit FlightPlanner(const FlightPlan& plan) : plan_(plan) {
    double t = 0.0;
    Vec3 from = plan.start;
    double yaw = 0.0;
    for (const auto& wp : plan.waypoints) {
      const double d = (wp.position - from).norm();
      const double T = segment_duration(d, plan.average_speed, plan.max_acceleration, plan.min_segment_time);
      legs_.push_back({t, fit_poly9(from, wp.position, T, yaw, wp.yaw), wp.hold_time});
      t += T + wp.hold_time;
      from = wp.position;
      yaw = wp.yaw;
    }
    end_ = t;
  }

  bool done(double t) const { return t >= end_; }

  std::pair<Setpoint, std::string> step(double t) const {
    const Leg* leg = &legs_.front();
    for (const auto& l : legs_) {
      if (t >= l.start) leg = &l;
    }
    const double local = t - leg->start;
    return {sample_setpoint(leg->segment, local), local < leg->segment.duration ? "Move" : "Hold"};
  }

 private:
  struct Leg {
    double start;
    PolySegment segment;
    double hold;
  };
  FlightPlan plan_;
  std::vector<Leg> legs_;
  double end_ = 0.0;
};

struct ClassMaps {
  VoltageMap main;
  VoltageMap aux;
};

double rated_speed(const PropellerSpec& p) { return std::sqrt(p.w_max); }

}  // namespace

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Success: return 0;
    case RunStatus::Aborted: return 2;
    case RunStatus::Diverged: return 3;
  }
  return 3;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Success: return "success";
    case RunStatus::Aborted: return "aborted";
    case RunStatus::Diverged: return "diverged";
  }
  return "?";
}

RunResult run_scenario(const ScenarioConfig& c) {
  validate(c);
  RunResult out;
  out.config_hash = config_hash(c);

  const long per_ctrl = std::lround(c.rates.physics / c.rates.controller);
  const long per_plan = std::lround(c.rates.physics / c.rates.planner);
  const double dt = 1.0 / c.rates.physics;
  const double dt_ctrl = 1.0 / c.rates.controller;

  const VehicleParams empty = c.vehicle;
  VehicleParams plant = empty;  // truth
  VehicleParams model = empty;  // controller's copy; switched on the same tick
  ControlGains gains = c.gains;
  const AllocationMatrix a = build_allocation_matrix(empty);
  const RotorBounds bounds = rotor_bounds(empty);

  auto loaded_gains = [&](const VehicleParams& loaded) {
    return c.loaded_gains ? *c.loaded_gains : c.gains.scaled_for_mass(loaded.mass / empty.mass);
  };

  std::optional<Mission> mission;
  std::optional<FlightPlanner> flight;
  RigidState truth;
  if (c.mission) {
    mission.emplace(*c.mission, c.gripper);
    truth.position = c.mission->home;
  } else {
    flight.emplace(*c.flight);
    truth.position = c.flight->start;
    if (c.flight->payload) {
      plant = compose_payload(plant, *c.flight->payload);
      model = plant;
      gains = loaded_gains(model);
    }
  }
  double carried_length = (flight && c.flight->payload) ? c.flight->payload->length : 0.0;

  // ESC calibration per rotor class from the simulated ESC law.
  ClassMaps maps;
  for (const auto& p : empty.propellers) {
    VoltageMap& m = p.rotor_class == RotorClass::Main ? maps.main : maps.aux;
    const auto samples = synthetic_voltage_samples(rated_speed(p), c.battery.nominal, c.voltage.fit_voltage_low,
                                                   c.voltage.fit_voltage_high);
    m = fit_voltage_map(samples);
  }

  BatteryState battery = c.battery;
  AllocationSolver solver;
  ControllerState ctl;
  std::mt19937_64 rng(c.seed);

  MotorState motors;
  {
    Wrench hover;
    hover.head<3>() = plant.mass * plant.gravity_world();
    hover.tail<3>() = plant.com_offset.cross(hover.head<3>());
    const QpSolution s = solve_qp(build_qp(a, hover, c.weights, bounds));
    motors.w_cmd = s.actuators(build_qp(a, hover, c.weights, bounds)).cwiseMax(bounds.w_min).cwiseMin(bounds.w_max);
    motors.w_act = motors.w_cmd;
  }

  auto to_commands = [&](const RotorVector& w_des) {
    RotorVector w_cmd;
    for (int i = 0; i < kNumRotors; ++i) {
      const PropellerSpec& p = empty.propellers[i];
      const double speed = std::sqrt(std::max(w_des(i), 0.0));
      double cmd = 0.0;
      if (c.voltage.enabled) {
        const VoltageMap& m = p.rotor_class == RotorClass::Main ? maps.main : maps.aux;
        cmd = apply_voltage_compensation(m, speed, battery.voltage).command;
      } else {
        cmd = std::clamp(speed / rated_speed(p), 0.0, 1.0);
      }
      const double omega = esc_speed(cmd, battery.voltage, battery.nominal, rated_speed(p));
      w_cmd(i) = omega * omega;
    }
    return w_cmd;
  };

  Setpoint sp;
  sp.position = truth.position;
  std::string phase = mission ? to_string(MissionPhase::Takeoff) : "Hold";
  bool frozen = false;
  RigidState measured = truth;
  bool finished = false;

  double t_now = 0.0;
  try {
    for (long k = 0; !finished; ++k) {
      const double t = static_cast<double>(k) * dt;
      t_now = t;
      if (t > c.time_limit) {
        out.status = RunStatus::Aborted;
        out.message = "simulated time limit reached";
        out.end_time = t;
        break;
      }
      const bool ctrl_tick = k % per_ctrl == 0;
      if (ctrl_tick) measured = measure(truth, c.noise, rng);

      if (k % per_plan == 0) {
        if (mission) {
          const MissionTick tick = mission->step({t, measured, truth});
          // Plant and controller model change together, before the control law runs.
          if (tick.attach) {
            plant = compose_payload(plant, *tick.attach);
            model = compose_payload(model, *tick.attach);
            gains = loaded_gains(model);
            carried_length = tick.attach->length;
          }
          if (tick.detach) {
            plant = remove_payload(plant, *tick.detach);
            model = remove_payload(model, *tick.detach);
            gains = c.gains;
            carried_length = 0.0;
          }
          sp = tick.setpoint;
          frozen = tick.integral_frozen;
          const std::string name = to_string(tick.phase);
          if (out.phase_sequence.empty() || out.phase_sequence.back() != name) out.phase_sequence.push_back(name);
          phase = name;
          if (mission->outcome() != MissionOutcome::Running) finished = true;
        } else {
          auto [s, name] = flight->step(t);
          sp = s;
          if (out.phase_sequence.empty() || out.phase_sequence.back() != name) out.phase_sequence.push_back(name);
          phase = name;
          if (flight->done(t)) finished = true;
        }
      }

      if (ctrl_tick) {
        const TrackingErrors e = compute_errors(measured, sp);
        ctl.integral_frozen = frozen;
        ctl = integral_update(ctl, e.position, dt_ctrl);
        const Wrench u = compute_wrench(e, measured, sp, model, gains, ctl);
        const QpProblem qp = build_qp(a, u, c.weights, bounds);
        const QpSolution sol = solver.solve(qp);
        motors.w_cmd = to_commands(sol.actuators(qp));

        if (mission) {
          const bool model_loaded = model.mass > empty.mass;
          if (mission->payload_attached() != model_loaded) ++out.model_mismatch_ticks;
          if ((phase == "Grasp" || phase == "Release") && !ctl.integral_frozen) ++out.unfrozen_gripper_ticks;
        }

        // Metrics and log from ground truth.
        const TrackingErrors te = compute_errors(truth, sp);
        const double e_r = compute_radial_error(te.position);
        const double e_tip = compute_radial_error(compute_tip_error(te.position, te.attitude, carried_length));
        const Mat3 rel = sp.attitude.transpose() * truth.attitude.matrix();
        out.metrics.add({t, phase, e_r, e_tip, std::abs(roll_of(rel)), std::abs(pitch_of(rel))});
        const double slack = sol.slack(qp).norm();
        out.max_slack_norm = std::max(out.max_slack_norm, slack);

        LogRow row;
        row.t = t;
        row.position = truth.position;
        const Eigen::Quaterniond q = truth.attitude.quaternion();
        row.quaternion = {q.w(), q.x(), q.y(), q.z()};
        row.velocity_body = truth.velocity_body;
        row.angular_velocity = truth.angular_velocity;
        row.w_cmd = motors.w_cmd;
        row.w_act = motors.w_act;
        row.u_des = u;
        row.slack_norm = slack;
        row.radial_error = e_r;
        row.tip_radial_error = e_tip;
        row.phase = phase;
        row.voltage = battery.voltage;
        row.position_des = sp.position;
        row.yaw_des = sp.yaw;
        row.pole_length = carried_length;
        out.log.push_back(std::move(row));
      }
      out.end_time = t;
      if (finished) break;

      motors = motor_lag_step(motors, c.motor_time_constants, bounds, dt);
      const Wrench applied = a * motors.w_act;
      try {
        truth = rk4_step(truth, plant, applied, dt);
      } catch (const DivergenceError& e) {
        throw DivergenceError(e.what(), t + dt);
      }
      battery = battery_step(battery, dt);
    }
  } catch (const DivergenceError& e) {
    out.status = RunStatus::Diverged;
    out.message = std::string(e.what()) + " at t=" + std::to_string(e.time()) + " s";
    out.end_time = e.time();
  } catch (const QpError& e) {
    out.status = RunStatus::Diverged;
    out.message = std::string(e.what()) + " at t=" + std::to_string(t_now) + " s";
    out.end_time = t_now;
  }

  if (mission) {
    out.placements = mission->placements();
    out.events = mission->events();
    if (out.status == RunStatus::Success && mission->outcome() == MissionOutcome::Aborted) {
      out.status = RunStatus::Aborted;
      out.message = mission->abort_reason();
    }
  }
  return out;
}

std::string summary_json(const ScenarioConfig& c, const RunResult& r) {
  using nlohmann::ordered_json;
  auto aggregate = [](const Aggregate& a, double scale) {
    return ordered_json{{"mean", a.mean * scale}, {"max", a.max * scale}};
  };
  auto phase_block = [&](const PhaseAggregates& p) {
    constexpr double deg = 180.0 / 3.14159265358979323846;
    return ordered_json{{"samples", p.radial.count},
                        {"radial_error_m", aggregate(p.radial, 1.0)},
                        {"tip_radial_error_m", aggregate(p.tip_radial, 1.0)},
                        {"roll_error_deg", aggregate(p.roll, deg)},
                        {"pitch_error_deg", aggregate(p.pitch, deg)}};
  };
  ordered_json j;
  j["format"] = "polelift-summary v1";
  j["scenario"] = c.name;
  j["config_hash"] = r.config_hash;
  j["seed"] = c.seed;
  j["outcome"] = to_string(r.status);
  j["exit_code"] = exit_code(r.status);
  j["message"] = r.message;
  j["total_time_s"] = r.end_time;
  j["phase_sequence"] = r.phase_sequence;
  ordered_json placements = ordered_json::array();
  for (const auto& p : r.placements) {
    placements.push_back({{"pole", p.pole},
                          {"time_s", p.time},
                          {"tip_radial_error_m", p.tip_radial_error},
                          {"bottom_offset_m", p.bottom_offset},
                          {"within_tolerance", p.within_tolerance}});
  }
  j["placements"] = placements;
  ordered_json phases = ordered_json::object();
  for (const auto& [name, agg] : r.metrics.per_phase()) phases[name] = phase_block(agg);
  j["phases"] = phases;
  j["overall"] = phase_block(r.metrics.overall());
  j["max_slack_norm"] = r.max_slack_norm;
  ordered_json events = ordered_json::array();
  for (const auto& e : r.events) events.push_back({{"t", e.time}, {"event", e.text}});
  j["events"] = events;
  j["resolved_config"] = canonical_dump(c);
  return j.dump(2) + "\n";
}

void write_outputs(const ScenarioConfig& c, const RunResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream log(std::filesystem::path(dir) / "log.csv", std::ios::binary);
    write_log(log, r.log);
    if (!log) throw std::runtime_error("failed writing " + dir + "/log.csv");
  }
  std::ofstream sum(std::filesystem::path(dir) / "summary.json", std::ios::binary);
  sum << summary_json(c, r);
  if (!sum) throw std::runtime_error("failed writing " + dir + "/summary.json");
}

}  // namespace polelift
