#include "polelift/controller.hpp"

#include <stdexcept>

namespace polelift {

ControlGains ControlGains::scaled_for_mass(double ratio) const {
  ControlGains g = *this;
  g.k_p *= ratio;
  g.k_v *= ratio;
  return g;
}

void validate(const ControlGains& g) {
  if (!(g.k_p > 0 && g.k_v > 0 && g.k_i > 0 && g.k_R > 0 && g.k_omega > 0)) {
    throw std::invalid_argument("all controller gains must be positive");
  }
}

TrackingErrors compute_errors(const RigidState& state, const Setpoint& sp) {
  const Mat3& r = state.attitude.matrix();
  const Mat3& r_des = sp.attitude.matrix();
  TrackingErrors e;
  e.position = state.position - sp.position;
  e.velocity = state.velocity_world() - sp.velocity;
  e.attitude = 0.5 * vee(r_des.transpose() * r - r.transpose() * r_des);
  e.angular_velocity = state.angular_velocity - r.transpose() * r_des * sp.angular_velocity;
  return e;
}

Wrench compute_wrench(const TrackingErrors& e, const RigidState& state, const Setpoint& sp,
                      const VehicleParams& model, const ControlGains& gains, const ControllerState& ctl) {
  const Mat3& r = state.attitude.matrix();
  const Vec3& w = state.angular_velocity;
  const Vec3 accel_cmd = -gains.k_p * e.position - gains.k_v * e.velocity - gains.k_i * ctl.integral +
                         sp.acceleration + model.gravity_world();
  const Vec3 force = model.mass * (r.transpose() * accel_cmd + w.cross(r.transpose() * state.velocity_world()));
  const Vec3 torque = model.inertia * (-gains.k_R * e.attitude - gains.k_omega * e.angular_velocity) +
                      w.cross(model.inertia * w) + model.com_offset.cross(force);
  Wrench u;
  u << force, torque;
  return u;
}

ControllerState integral_update(const ControllerState& ctl, const Vec3& e_p, double dt) {
  if (ctl.integral_frozen) return ctl;
  ControllerState out = ctl;
  out.integral = (ctl.integral + e_p * dt).cwiseMax(-kIntegralLimit).cwiseMin(kIntegralLimit);
  return out;
}

}  // namespace polelift
