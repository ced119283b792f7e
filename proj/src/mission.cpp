#include "polelift/mission.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "polelift/metrics.hpp"

namespace polelift {

std::string to_string(MissionPhase p) {
  switch (p) {
    case MissionPhase::Takeoff: return "Takeoff";
    case MissionPhase::FlyOverPole: return "FlyOverPole";
    case MissionPhase::Descend: return "Descend";
    case MissionPhase::Grasp: return "Grasp";
    case MissionPhase::Lift: return "Lift";
    case MissionPhase::Transport: return "Transport";
    case MissionPhase::Place: return "Place";
    case MissionPhase::Release: return "Release";
    case MissionPhase::Ascend: return "Ascend";
    case MissionPhase::ReturnHome: return "ReturnHome";
    case MissionPhase::Land: return "Land";
  }
  return "?";
}

void validate(const MissionScript& s) {
  if (s.poles.empty()) throw std::invalid_argument("mission needs at least one pole");
  if (!(s.average_speed > 0.0 && s.max_acceleration > 0.0)) {
    throw std::invalid_argument("mission speed and acceleration caps must be positive");
  }
  if (!(s.clearance > 0.0 && s.hold_time >= 0.0 && s.gate_dwell >= 0.0 && s.gate_timeout > 0.0)) {
    throw std::invalid_argument("mission clearance/hold/gate times out of range");
  }
  if (s.max_attempts < 1) throw std::invalid_argument("mission max_attempts must be >= 1");
  if (!(s.contact_tolerance > 0.0 && s.creep_speed > 0.0 && s.mount_tolerance > 0.0)) {
    throw std::invalid_argument("mission tolerances must be positive");
  }
  for (const auto& p : s.poles) validate(p.pole);
}

Mission::Mission(MissionScript script, GripperGeometry gripper)
    : script_(std::move(script)), geometry_(gripper) {
  validate(script_);
  validate(geometry_);
}

double Mission::carried_length() const { return attached_ ? script_.poles[pole_].pole.length : 0.0; }

Vec3 Mission::pole_bottom(const RigidState& truth, const PayloadSpec& pole) {
  return truth.position + truth.attitude * (pole.grasp_offset - 0.5 * pole.length * Vec3::UnitZ());
}

Vec3 Mission::grasp_center(const PoleTask& task, bool actual) const {
  const Vec3 base = actual ? task.actual_pickup() : task.pickup;
  return base + Vec3(0.0, 0.0, 0.5 * task.pole.length) - task.pole.grasp_offset;
}

double Mission::over_pole_z(const PoleTask& task) const {
  return task.pickup.z() + task.pole.length + script_.clearance;
}

double Mission::carry_z(const PoleTask& task) const {
  const double bottom = std::max(task.pickup.z(), task.place.z()) + script_.clearance;
  return bottom + 0.5 * task.pole.length - task.pole.grasp_offset.z();
}

void Mission::log(double t, std::string text) { events_.push_back({t, std::move(text)}); }

void Mission::start_motion(const Vec3& target, double t) {
  const double distance = (target - ref_).norm();
  const double duration = segment_duration(distance, script_.average_speed, script_.max_acceleration,
                                           script_.min_segment_time);
  segment_ = fit_poly9(ref_, target, duration);
  segment_start_ = t;
  ref_ = target;
}

bool Mission::motion_done(double t) const { return !segment_ || t >= segment_start_ + segment_->duration; }

bool Mission::settled(double t) const {
  return motion_done(t) && t >= segment_start_ + (segment_ ? segment_->duration : 0.0) + script_.hold_time;
}

void Mission::enter(MissionPhase next, double t) {
  phase_ = next;
  phase_start_ = t;
  history_.push_back(next);
  log(t, "phase " + to_string(next) + " (pole " + std::to_string(pole_ + 1) + ")");
  const PoleTask& task = script_.poles[pole_];
  switch (next) {
    case MissionPhase::Takeoff:
      start_motion({script_.home.x(), script_.home.y(), over_pole_z(task)}, t);
      break;
    case MissionPhase::FlyOverPole:
      start_motion({task.pickup.x(), task.pickup.y(), std::max(ref_.z(), over_pole_z(task))}, t);
      break;
    case MissionPhase::Descend:
      gate_since_.reset();
      start_motion(grasp_center(task, false), t);
      break;
    case MissionPhase::Grasp: {
      frozen_ = true;
      gripper_plan_from_ = gripper_;
      gripper_plan_ = grasp_sequencer(gripper_, GripperCommand::Grasp, true, t, geometry_);
      for (const auto& e : gripper_plan_->events) {
        log(e.time, e.kind == GripperEvent::Kind::CenterStart ? "gripper center" : "gripper lock");
      }
      break;
    }
    case MissionPhase::Lift:
      start_motion({ref_.x(), ref_.y(), carry_z(task)}, t);
      break;
    case MissionPhase::Transport:
      start_motion({task.place.x(), task.place.y(), ref_.z()}, t);
      break;
    case MissionPhase::Place:
      start_motion({task.place.x(), task.place.y(),
                    task.place.z() + 0.5 * task.pole.length - task.pole.grasp_offset.z()},
                   t);
      break;
    case MissionPhase::Release:
      frozen_ = true;
      gripper_plan_.reset();
      release_refused_logged_ = false;
      break;
    case MissionPhase::Ascend:
      start_motion({ref_.x(), ref_.y(), task.place.z() + task.pole.length + script_.clearance}, t);
      break;
    case MissionPhase::ReturnHome:
      start_motion({script_.home.x(), script_.home.y(), ref_.z()}, t);
      break;
    case MissionPhase::Land:
      start_motion(script_.home, t);
      break;
  }
}

MissionTick Mission::step(const MissionStatus& status) {
  const double t = status.time;
  if (!started_) {
    started_ = true;
    ref_ = script_.home;
    last_time_ = t;
    enter(MissionPhase::Takeoff, t);
  }
  const double dt = std::max(0.0, t - last_time_);
  last_time_ = t;

  MissionTick tick;
  const PoleTask& task = script_.poles[pole_];

  if (outcome_ == MissionOutcome::Running) {
    switch (phase_) {
      case MissionPhase::Takeoff:
        if (settled(t)) enter(MissionPhase::FlyOverPole, t);
        break;
      case MissionPhase::FlyOverPole:
        if (settled(t)) enter(MissionPhase::Descend, t);
        break;
      case MissionPhase::Descend: {
        if (!motion_done(t)) break;
        const double e_r = compute_radial_error(status.measured.position - grasp_center(task, true));
        if (e_r < radial_tolerance(geometry_)) {
          if (!gate_since_) gate_since_ = t;
          if (t - *gate_since_ >= script_.gate_dwell) {
            enter(MissionPhase::Grasp, t);
            break;
          }
        } else {
          gate_since_.reset();
        }
        if (t - (segment_start_ + segment_->duration) >= script_.gate_timeout) {
          std::ostringstream msg;
          msg << "grasp gate not met (e_r=" << e_r << " m) on attempt " << attempt_;
          log(t, msg.str());
          if (attempt_ >= script_.max_attempts) {
            outcome_ = MissionOutcome::Aborted;
            abort_reason_ = "pole " + std::to_string(pole_ + 1) + ": radial error never below tolerance after " +
                            std::to_string(attempt_) + " attempts";
            log(t, "abort: " + abort_reason_);
          } else {
            ++attempt_;
            enter(MissionPhase::FlyOverPole, t);
          }
        }
        break;
      }
      case MissionPhase::Grasp: {
        gripper_ = phase_at(*gripper_plan_, gripper_plan_from_, t, geometry_);
        if (gripper_ == GripperPhase::Locked && !attached_) {
          attached_ = true;
          tick.attach = task.pole;
          unfreeze_at_ = t + script_.freeze_extension;
          log(t, "gripper locked; payload model attached");
        }
        if (attached_ && t >= *unfreeze_at_) {
          frozen_ = false;
          enter(MissionPhase::Lift, t);
        }
        break;
      }
      case MissionPhase::Lift:
        if (settled(t)) enter(MissionPhase::Transport, t);
        break;
      case MissionPhase::Transport:
        if (settled(t)) enter(MissionPhase::Place, t);
        break;
      case MissionPhase::Place:
        if (settled(t)) enter(MissionPhase::Release, t);
        break;
      case MissionPhase::Release: {
        if (!gripper_plan_) {
          const Vec3 bottom = pole_bottom(status.truth, task.pole);
          const bool on_ground = std::abs(bottom.z() - task.place.z()) <= script_.contact_tolerance;
          auto plan = grasp_sequencer(gripper_, GripperCommand::Release, on_ground, t, geometry_);
          if (plan.refusal) {
            if (!release_refused_logged_) {
              log(t, "release refused: " + *plan.refusal);
              release_refused_logged_ = true;
            }
            segment_.reset();
            ref_.z() -= script_.creep_speed * dt;
            break;
          }
          // Touchdown: record placement accuracy before opening.
          Setpoint hold;
          hold.position = ref_;
          const TrackingErrors e = compute_errors(status.truth, hold);
          PlacementRecord rec;
          rec.pole = pole_ + 1;
          rec.time = t;
          rec.tip_radial_error =
              compute_radial_error(compute_tip_error(e.position, e.attitude, task.pole.length));
          const Vec3 offset = bottom - task.place;
          rec.bottom_offset = std::hypot(offset.x(), offset.y());
          rec.within_tolerance = rec.tip_radial_error < script_.mount_tolerance;
          placements_.push_back(rec);
          std::ostringstream msg;
          msg << "touchdown pole " << rec.pole << ": tip radial error " << rec.tip_radial_error << " m";
          log(t, msg.str());
          frozen_ = true;
          gripper_plan_from_ = gripper_;
          gripper_plan_ = plan;
          break;
        }
        gripper_ = phase_at(*gripper_plan_, gripper_plan_from_, t, geometry_);
        if (gripper_ == GripperPhase::Open && attached_) {
          attached_ = false;
          tick.detach = task.pole;
          unfreeze_at_ = t + script_.freeze_extension;
          log(t, "gripper open; payload model detached");
        }
        if (!attached_ && t >= *unfreeze_at_) {
          frozen_ = false;
          enter(MissionPhase::Ascend, t);
        }
        break;
      }
      case MissionPhase::Ascend:
        if (settled(t)) {
          if (pole_ + 1 < static_cast<int>(script_.poles.size())) {
            ++pole_;
            attempt_ = 1;
            enter(MissionPhase::FlyOverPole, t);
          } else {
            enter(MissionPhase::ReturnHome, t);
          }
        }
        break;
      case MissionPhase::ReturnHome:
        if (settled(t)) enter(MissionPhase::Land, t);
        break;
      case MissionPhase::Land:
        if (settled(t)) {
          outcome_ = MissionOutcome::Success;
          log(t, "mission complete");
        }
        break;
    }
  }

  if (segment_) {
    tick.setpoint = sample_setpoint(*segment_, t - segment_start_);
  } else {
    tick.setpoint.position = ref_;
    if (phase_ == MissionPhase::Release && !gripper_plan_ && outcome_ == MissionOutcome::Running) {
      tick.setpoint.velocity = {0.0, 0.0, -script_.creep_speed};
    }
  }
  tick.phase = phase_;
  tick.integral_frozen = frozen_;
  return tick;
}

}  // namespace polelift
