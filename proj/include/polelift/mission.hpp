#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polelift/controller.hpp"
#include "polelift/dynamics.hpp"
#include "polelift/gripper.hpp"
#include "polelift/trajectory.hpp"
#include "polelift/vehicle.hpp"

namespace polelift {

enum class MissionPhase {
  Takeoff,
  FlyOverPole,
  Descend,
  Grasp,
  Lift,
  Transport,
  Place,
  Release,
  Ascend,
  ReturnHome,
  Land,
};

std::string to_string(MissionPhase p);

enum class WaypointAction { None, Grasp, Release };

struct Waypoint {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double hold_time = 0.0;
  WaypointAction action = WaypointAction::None;
};

struct PoleTask {
  Vec3 pickup = Vec3::Zero();          // planned ground point under the pole axis
  Vec3 pickup_offset = Vec3::Zero();   // actual minus planned pole location
  Vec3 place = Vec3::Zero();           // support point the pole bottom must reach
  PayloadSpec pole;

  Vec3 actual_pickup() const { return pickup + pickup_offset; }
};

struct MissionScript {
  Vec3 home = Vec3::Zero();
  double clearance = 0.5;          // vertical margin over pole tops / supports [m]
  double average_speed = 0.5;      // [m/s]
  double max_acceleration = 0.25;  // [m/s^2]
  double min_segment_time = 2.0;   // [s]
  double hold_time = 1.0;          // settle time at the end of each motion [s]
  double gate_dwell = 1.0;         // e_r < t must hold this long before grasping [s]
  double gate_timeout = 5.0;       // [s] after descent before a retry
  int max_attempts = 3;
  double freeze_extension = 1.0;   // integral stays frozen this long after lock/open [s]
  double contact_tolerance = 0.01; // pole bottom to support distance counted as contact [m]
  double creep_speed = 0.005;      // downward creep while a release is refused [m/s]
  double mount_tolerance = 0.05;   // acceptance radius of the conical mount [m]
  std::vector<PoleTask> poles;
};

void validate(const MissionScript& s);

struct MissionStatus {
  double time = 0.0;
  RigidState measured;
  RigidState truth;
};

enum class MissionOutcome { Running, Success, Aborted };

struct PlacementRecord {
  int pole = 0;
  double time = 0.0;
  double tip_radial_error = 0.0;  // from the propagated tip error
  double bottom_offset = 0.0;     // true horizontal distance pole bottom to support point
  bool within_tolerance = false;
};

struct MissionEvent {
  double time;
  std::string text;
};

struct MissionTick {
  Setpoint setpoint;
  MissionPhase phase = MissionPhase::Takeoff;
  bool integral_frozen = false;
  // Set on the tick the payload becomes attached / detached; the runner
  // must switch plant and controller model together.
  std::optional<PayloadSpec> attach;
  std::optional<PayloadSpec> detach;
};

// Two-pole pick/transport/stack script. Sole owner of the gripper state.
class Mission {
 public:
  Mission(MissionScript script, GripperGeometry gripper);

  MissionTick step(const MissionStatus& status);

  MissionPhase phase() const { return phase_; }
  MissionOutcome outcome() const { return outcome_; }
  GripperPhase gripper_phase() const { return gripper_; }
  bool payload_attached() const { return attached_; }
  // Pole currently carried (or being worked on).
  int current_pole() const { return pole_; }
  double carried_length() const;
  const std::vector<PlacementRecord>& placements() const { return placements_; }
  const std::vector<MissionEvent>& events() const { return events_; }
  const std::vector<MissionPhase>& phase_history() const { return history_; }
  const std::string& abort_reason() const { return abort_reason_; }
  int attempts() const { return attempt_; }

  // Pole bottom point in world for the truth state while the pole is held.
  static Vec3 pole_bottom(const RigidState& truth, const PayloadSpec& pole);

 private:
  void enter(MissionPhase next, double t);
  void start_motion(const Vec3& target, double t);
  bool motion_done(double t) const;
  bool settled(double t) const;
  Vec3 grasp_center(const PoleTask& task, bool actual) const;
  double over_pole_z(const PoleTask& task) const;
  double carry_z(const PoleTask& task) const;
  void log(double t, std::string text);

  MissionScript script_;
  GripperGeometry geometry_;
  MissionPhase phase_ = MissionPhase::Takeoff;
  MissionOutcome outcome_ = MissionOutcome::Running;
  std::vector<MissionPhase> history_;
  std::vector<MissionEvent> events_;
  std::vector<PlacementRecord> placements_;
  std::string abort_reason_;

  int pole_ = 0;
  int attempt_ = 1;
  bool started_ = false;
  bool attached_ = false;
  bool frozen_ = false;

  Vec3 ref_ = Vec3::Zero();  // end point of the active motion
  std::optional<PolySegment> segment_;
  double segment_start_ = 0.0;
  double phase_start_ = 0.0;

  std::optional<double> gate_since_;
  GripperPhase gripper_ = GripperPhase::Open;
  std::optional<SequencerResult> gripper_plan_;
  GripperPhase gripper_plan_from_ = GripperPhase::Open;
  std::optional<double> unfreeze_at_;
  bool release_refused_logged_ = false;
  double last_time_ = 0.0;
};

}  // namespace polelift
