#pragma once

#include <random>

#include "polelift/so3.hpp"
#include "polelift/vehicle.hpp"

namespace polelift {

struct RigidState {
  Vec3 position = Vec3::Zero();         // p_w [m]
  RotationMatrix attitude;              // R_wb
  Vec3 velocity_body = Vec3::Zero();    // v_b [m/s]
  Vec3 angular_velocity = Vec3::Zero(); // omega_b [rad/s]

  Vec3 velocity_world() const { return attitude * velocity_body; }
};

struct StateDerivative {
  Vec3 position = Vec3::Zero();
  Mat3 attitude = Mat3::Zero();
  Vec3 velocity_body = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
};

// Newton-Euler right-hand side about the geometric center:
//   m v_b' = f_b - omega x (m v_b) - m R' g_w
//   J omega' = tau_b - omega x (J omega) - x_com x f_b
//   p' = R v_b,  R' = R omega^
StateDerivative newton_euler_derivative(const RigidState& s, const VehicleParams& params, const Wrench& u);

// Classical RK4 with the wrench held over the step; the attitude is
// re-orthonormalized afterwards. Throws DivergenceError if any state
// component exceeds 1e6 in magnitude or becomes non-finite.
RigidState rk4_step(const RigidState& s, const VehicleParams& params, const Wrench& u, double dt);

struct MotorState {
  RotorVector w_act = RotorVector::Zero();  // realized squared speeds
  RotorVector w_cmd = RotorVector::Zero();  // squared-speed targets from the ESCs
};

// First-order lag on rotor speed sqrt(w) with per-rotor time constants,
// exact discretization; result clamped to [w_min, w_max].
MotorState motor_lag_step(const MotorState& m, const RotorVector& time_constants, const RotorBounds& bounds,
                          double dt);

struct BatteryState {
  double voltage = 25.2;          // [V]
  double nominal = 24.0;          // [V]
  double discharge_slope = 0.007; // [V/s] at hover draw

  bool in_valid_range() const { return voltage > 0.8 * nominal && voltage <= 1.05 * nominal + 1e-9; }
};

BatteryState battery_step(const BatteryState& b, double dt);

// Rotor speed the ESC settles to for a command fraction at supply voltage v:
// omega = cmd * omega_rated * v / v_nominal.
double esc_speed(double command, double voltage, double nominal_voltage, double rated_speed);

struct MeasurementNoise {
  bool enabled = false;
  double sigma_position = 0.002;   // [m]
  double sigma_attitude = 0.2;     // [deg], per axis
};

// Ground truth plus optional zero-mean Gaussian noise on position and
// attitude; twist is passed through.
RigidState measure(const RigidState& truth, const MeasurementNoise& noise, std::mt19937_64& rng);

}  // namespace polelift
