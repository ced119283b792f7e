#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "polelift/so3.hpp"

namespace polelift {

// Two-stage gripper: a centering stage followed by a self-locking lifting
// stage made of three hinged triangles spaced 120 degrees apart.
struct GripperGeometry {
  double incircle_radius = 0.125;  // R [m]
  double pole_radius_min = 0.05;   // [m]
  double pole_radius_max = 0.075;  // [m]
  double fold_angle = 0.0;         // alpha [rad]
  double friction_coeff = 0.0;     // mu
  // Per-triangle deviation from fold_angle [rad]; zero means perfectly centered.
  std::array<double, 3> fold_angle_perturbation{0.0, 0.0, 0.0};
  double centering_time = 2.0;     // [s]
  double locking_time = 2.0;       // [s]
};

void validate(const GripperGeometry& g);

// t = R - r_max.
double radial_tolerance(const GripperGeometry& g);

// mu >= tan(alpha). Takes no force argument: the grip condition does not
// depend on the load weight.
bool self_lock_check(const GripperGeometry& g);

struct TriangleForces {
  Vec3 friction;  // f_f,i, along +z body
  Vec3 normal;    // f_n,i, radial toward the pole axis
};

struct LiftingStatics {
  std::array<TriangleForces, 3> triangles{};
  Vec3 friction_sum = Vec3::Zero();
  Vec3 normal_sum = Vec3::Zero();
};

// Forces on the pole from the three triangles for total pole weight
// pole_weight [N] (acting along -z). Throws std::domain_error when the
// self-lock condition fails.
LiftingStatics lifting_statics(const GripperGeometry& g, double pole_weight);

enum class GripperPhase { Open, Centered, Locked };
enum class GripperCommand { Grasp, Release };

struct GripperEvent {
  enum class Kind { CenterStart, LockStart, UnlockStart, UncenterStart } kind;
  double time;  // absolute start time [s]
};

struct SequencerResult {
  GripperPhase phase = GripperPhase::Open;   // phase once all events complete
  std::vector<GripperEvent> events;
  std::optional<std::string> refusal;        // set when the command was rejected
  double completion_time = 0.0;
};

// Plans the actuation for a command issued at time t0. Release under load
// (pole not supported by the ground) is refused and leaves the phase
// unchanged.
SequencerResult grasp_sequencer(GripperPhase state, GripperCommand command, bool pole_on_ground,
                                double t0, const GripperGeometry& g);

// Phase reached at time t by a sequence started from `from`.
GripperPhase phase_at(const SequencerResult& plan, GripperPhase from, double t, const GripperGeometry& g);

std::string to_string(GripperPhase p);

}  // namespace polelift
