#include "polelift/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polelift/error.hpp"

namespace polelift {

namespace {

// Right-hand side on an unconstrained attitude matrix; RK4 stages are not
// exactly on SO(3) and must not be projected mid-step.
StateDerivative rhs(const Mat3& r, const Vec3& v, const Vec3& w, const VehicleParams& params, const Wrench& u) {
  const Vec3 f = u.head<3>();
  const Vec3 tau = u.tail<3>();
  StateDerivative d;
  d.position = r * v;
  d.attitude = r * hat(w);
  d.velocity_body = f / params.mass - w.cross(v) - r.transpose() * params.gravity_world();
  const Vec3 moment = tau - w.cross(params.inertia * w) - params.com_offset.cross(f);
  d.angular_velocity = params.inertia.ldlt().solve(moment);
  return d;
}

struct RawState {
  Vec3 p;
  Mat3 r;
  Vec3 v;
  Vec3 w;
};

StateDerivative derivative_raw(const RawState& x, const VehicleParams& params, const Wrench& u) {
  return rhs(x.r, x.v, x.w, params, u);
}

RawState advance(const RawState& s, const StateDerivative& d, double h) {
  return {s.p + h * d.position, s.r + h * d.attitude, s.v + h * d.velocity_body, s.w + h * d.angular_velocity};
}

void guard(const RigidState& s) {
  constexpr double kLimit = 1e6;
  auto bad = [](const Vec3& x) { return !x.allFinite() || x.cwiseAbs().maxCoeff() > kLimit; };
  if (bad(s.position) || bad(s.velocity_body) || bad(s.angular_velocity) || !s.attitude.matrix().allFinite()) {
    throw DivergenceError("state diverged (|x| > 1e6 or non-finite)");
  }
}

}  // namespace

StateDerivative newton_euler_derivative(const RigidState& s, const VehicleParams& params, const Wrench& u) {
  return rhs(s.attitude.matrix(), s.velocity_body, s.angular_velocity, params, u);
}

RigidState rk4_step(const RigidState& s, const VehicleParams& params, const Wrench& u, double dt) {
  const RawState x0{s.position, s.attitude.matrix(), s.velocity_body, s.angular_velocity};
  const StateDerivative k1 = derivative_raw(x0, params, u);
  const StateDerivative k2 = derivative_raw(advance(x0, k1, dt / 2), params, u);
  const StateDerivative k3 = derivative_raw(advance(x0, k2, dt / 2), params, u);
  const StateDerivative k4 = derivative_raw(advance(x0, k3, dt), params, u);

  RawState x1;
  x1.p = x0.p + dt / 6 * (k1.position + 2 * k2.position + 2 * k3.position + k4.position);
  x1.r = x0.r + dt / 6 * (k1.attitude + 2 * k2.attitude + 2 * k3.attitude + k4.attitude);
  x1.v = x0.v + dt / 6 * (k1.velocity_body + 2 * k2.velocity_body + 2 * k3.velocity_body + k4.velocity_body);
  x1.w = x0.w + dt / 6 * (k1.angular_velocity + 2 * k2.angular_velocity + 2 * k3.angular_velocity +
                          k4.angular_velocity);
  if (!x1.r.allFinite()) throw DivergenceError("attitude became non-finite");
  RigidState out;
  out.position = x1.p;
  out.attitude = RotationMatrix::orthonormalized(x1.r);
  out.velocity_body = x1.v;
  out.angular_velocity = x1.w;
  guard(out);
  return out;
}

MotorState motor_lag_step(const MotorState& m, const RotorVector& time_constants, const RotorBounds& bounds,
                          double dt) {
  MotorState out = m;
  for (int i = 0; i < kNumRotors; ++i) {
    const double target = std::sqrt(std::clamp(m.w_cmd[i], bounds.w_min[i], bounds.w_max[i]));
    const double speed = std::sqrt(std::max(m.w_act[i], 0.0));
    const double decay = time_constants[i] > 0.0 ? std::exp(-dt / time_constants[i]) : 0.0;
    const double next = target + (speed - target) * decay;
    out.w_act[i] = std::clamp(next * next, bounds.w_min[i], bounds.w_max[i]);
  }
  return out;
}

BatteryState battery_step(const BatteryState& b, double dt) {
  BatteryState out = b;
  out.voltage = b.voltage - b.discharge_slope * dt;
  return out;
}

double esc_speed(double command, double voltage, double nominal_voltage, double rated_speed) {
  return std::clamp(command, 0.0, 1.0) * rated_speed * voltage / nominal_voltage;
}

RigidState measure(const RigidState& truth, const MeasurementNoise& noise, std::mt19937_64& rng) {
  if (!noise.enabled) return truth;
  std::normal_distribution<double> unit(0.0, 1.0);
  RigidState m = truth;
  m.position += noise.sigma_position * Vec3(unit(rng), unit(rng), unit(rng));
  const double sigma = noise.sigma_attitude * std::numbers::pi / 180.0;
  const Vec3 tilt = sigma * Vec3(unit(rng), unit(rng), unit(rng));
  m.attitude = truth.attitude * rotation_exp(tilt, 1.0);
  return m;
}

}  // namespace polelift
