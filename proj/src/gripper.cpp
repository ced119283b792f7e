#include "polelift/gripper.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polelift {

void validate(const GripperGeometry& g) {
  if (!(g.pole_radius_min > 0.0 && g.pole_radius_min <= g.pole_radius_max &&
        g.pole_radius_max < g.incircle_radius)) {
    throw std::invalid_argument(
        "gripper geometry must satisfy 0 < r_min <= r_max < R (radial tolerance t = R - r_max > 0)");
  }
  if (!(g.fold_angle > 0.0 && g.fold_angle < std::numbers::pi / 2.0)) {
    throw std::invalid_argument("gripper fold angle must lie in (0, pi/2)");
  }
  if (!(g.friction_coeff > 0.0)) throw std::invalid_argument("gripper friction coefficient must be positive");
  if (!(g.centering_time >= 0.0 && g.locking_time >= 0.0)) {
    throw std::invalid_argument("gripper actuation times must be non-negative");
  }
}

double radial_tolerance(const GripperGeometry& g) { return g.incircle_radius - g.pole_radius_max; }

bool self_lock_check(const GripperGeometry& g) {
  for (double delta : g.fold_angle_perturbation) {
    // atan is monotone, so this is mu >= tan(alpha) without rounding at the boundary.
    if (std::atan(g.friction_coeff) < g.fold_angle + delta) return false;
  }
  return true;
}

LiftingStatics lifting_statics(const GripperGeometry& g, double pole_weight) {
  if (!self_lock_check(g)) {
    throw std::domain_error("self-lock condition mu >= tan(alpha) violated: pole would slip");
  }
  LiftingStatics s;
  const double friction = std::abs(pole_weight) / 3.0;
  for (int i = 0; i < 3; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / 3.0;
    const Vec3 inward{-std::cos(phi), -std::sin(phi), 0.0};
    const double alpha = g.fold_angle + g.fold_angle_perturbation[i];
    auto& t = s.triangles[i];
    t.friction = {0.0, 0.0, friction};
    t.normal = (friction / std::tan(alpha)) * inward;
    s.friction_sum += t.friction;
    s.normal_sum += t.normal;
  }
  return s;
}

SequencerResult grasp_sequencer(GripperPhase state, GripperCommand command, bool pole_on_ground,
                                double t0, const GripperGeometry& g) {
  SequencerResult r;
  r.phase = state;
  r.completion_time = t0;
  using K = GripperEvent::Kind;
  if (command == GripperCommand::Grasp) {
    switch (state) {
      case GripperPhase::Open:
        r.events = {{K::CenterStart, t0}, {K::LockStart, t0 + g.centering_time}};
        r.completion_time = t0 + g.centering_time + g.locking_time;
        break;
      case GripperPhase::Centered:
        r.events = {{K::LockStart, t0}};
        r.completion_time = t0 + g.locking_time;
        break;
      case GripperPhase::Locked:
        r.refusal = "grasp: gripper already locked";
        return r;
    }
    r.phase = GripperPhase::Locked;
    return r;
  }
  if (state == GripperPhase::Open) {
    r.refusal = "release: gripper already open";
    return r;
  }
  if (state == GripperPhase::Locked && !pole_on_ground) {
    r.refusal = "self-locking cannot release under load";
    return r;
  }
  if (state == GripperPhase::Locked) {
    r.events = {{K::UnlockStart, t0}, {K::UncenterStart, t0 + g.locking_time}};
    r.completion_time = t0 + g.locking_time + g.centering_time;
  } else {
    r.events = {{K::UncenterStart, t0}};
    r.completion_time = t0 + g.centering_time;
  }
  r.phase = GripperPhase::Open;
  return r;
}

GripperPhase phase_at(const SequencerResult& plan, GripperPhase from, double t, const GripperGeometry& g) {
  if (plan.refusal) return from;
  GripperPhase p = from;
  for (const auto& e : plan.events) {
    using K = GripperEvent::Kind;
    switch (e.kind) {
      case K::CenterStart:
        if (t >= e.time + g.centering_time) p = GripperPhase::Centered;
        break;
      case K::LockStart:
        if (t >= e.time + g.locking_time) p = GripperPhase::Locked;
        break;
      case K::UnlockStart:
        if (t >= e.time + g.locking_time) p = GripperPhase::Centered;
        break;
      case K::UncenterStart:
        if (t >= e.time + g.centering_time) p = GripperPhase::Open;
        break;
    }
  }
  return p;
}

std::string to_string(GripperPhase p) {
  switch (p) {
    case GripperPhase::Open: return "open";
    case GripperPhase::Centered: return "centered";
    case GripperPhase::Locked: return "locked";
  }
  return "?";
}

}  // namespace polelift
