#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polelift/allocation.hpp"
#include "polelift/controller.hpp"
#include "polelift/dynamics.hpp"
#include "polelift/gripper.hpp"
#include "polelift/mission.hpp"
#include "polelift/vehicle.hpp"

namespace polelift {

struct Rates {
  double physics = 1000.0;     // [Hz]
  double controller = 200.0;   // [Hz]
  double planner = 100.0;      // [Hz]
};

struct VoltageCompensationConfig {
  bool enabled = true;
  double fit_voltage_low = 20.0;   // calibration sweep [V]
  double fit_voltage_high = 25.5;
};

// Waypoint flight without the gripper (hover and step tests). The payload,
// when given, is attached from t = 0.
struct FlightPlan {
  Vec3 start = Vec3::Zero();
  std::optional<PayloadSpec> payload;
  std::vector<Waypoint> waypoints;
  double average_speed = 0.5;
  double max_acceleration = 0.25;
  double min_segment_time = 2.0;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 0;
  Rates rates;
  double time_limit = 600.0;        // [s] simulated
  std::string output_dir;
  VehicleParams vehicle;
  RotorVector motor_time_constants = RotorVector::Zero();
  GripperGeometry gripper;
  ControlGains gains;
  // Unset: gains.scaled_for_mass(loaded mass / empty mass) at attach time.
  std::optional<ControlGains> loaded_gains;
  AllocationWeights weights;
  BatteryState battery;
  MeasurementNoise noise;
  VoltageCompensationConfig voltage;
  std::optional<MissionScript> mission;  // exactly one of mission / flight
  std::optional<FlightPlan> flight;
};

// Parse and validate. Throws ConfigError with the dotted key path and the
// source line.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

// Cross-field checks (pole radii against the gripper, rates, ...).
void validate(const ScenarioConfig& c);

// Fully resolved configuration, defaults included, in the input grammar.
// output_dir is left out: where results go does not change them.
std::string canonical_dump(const ScenarioConfig& c);
// SHA-256 (hex) of canonical_dump.
std::string config_hash(const ScenarioConfig& c);

}  // namespace polelift
