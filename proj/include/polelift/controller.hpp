#pragma once

#include "polelift/dynamics.hpp"
#include "polelift/so3.hpp"
#include "polelift/vehicle.hpp"

namespace polelift {

struct ControlGains {
  double k_p = 6.0;
  double k_v = 4.5;
  double k_i = 0.6;
  double k_R = 12.0;
  double k_omega = 4.0;

  // Loaded-configuration default: k_p, k_v scaled by the mass ratio.
  ControlGains scaled_for_mass(double ratio) const;
};

void validate(const ControlGains& g);

inline constexpr double kIntegralLimit = 1.0;  // [m s]

struct ControllerState {
  Vec3 integral = Vec3::Zero();  // e_i
  bool integral_frozen = false;
};

struct Setpoint {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();       // world frame
  Vec3 acceleration = Vec3::Zero();   // world frame
  RotationMatrix attitude;            // flat, yaw only
  Vec3 angular_velocity = Vec3::Zero();
  double yaw = 0.0;
};

struct TrackingErrors {
  Vec3 position;          // e_p
  Vec3 velocity;          // e_v
  Vec3 attitude;          // e_R
  Vec3 angular_velocity;  // e_omega
};

TrackingErrors compute_errors(const RigidState& state, const Setpoint& sp);

// Wrench target: PID on the translational errors with gravity and
// acceleration feedforward, PD on attitude with gyroscopic and CoM
// compensation.
Wrench compute_wrench(const TrackingErrors& e, const RigidState& state, const Setpoint& sp,
                      const VehicleParams& model, const ControlGains& gains, const ControllerState& ctl);

// e_i <- clamp(e_i + e_p dt, +-1 m s) unless frozen.
ControllerState integral_update(const ControllerState& ctl, const Vec3& e_p, double dt);

}  // namespace polelift
