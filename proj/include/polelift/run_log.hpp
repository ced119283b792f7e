#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "polelift/vehicle.hpp"

namespace polelift {

inline constexpr const char* kLogVersionLine = "# polelift-log v1";

// One row per controller tick. Pose and twist are ground truth; p_des,
// yaw_des and pole_len make e_r and e_r,tip recomputable offline.
struct LogRow {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Eigen::Vector4d quaternion{1.0, 0.0, 0.0, 0.0};  // (w, x, y, z)
  Vec3 velocity_body = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  RotorVector w_cmd = RotorVector::Zero();
  RotorVector w_act = RotorVector::Zero();
  Wrench u_des = Wrench::Zero();
  double slack_norm = 0.0;
  double radial_error = 0.0;
  double tip_radial_error = 0.0;
  std::string phase;
  double voltage = 0.0;
  Vec3 position_des = Vec3::Zero();
  double yaw_des = 0.0;
  double pole_length = 0.0;
};

std::string log_header();
void write_log(std::ostream& out, const std::vector<LogRow>& rows);
// Throws std::runtime_error on a version/header mismatch or malformed row.
std::vector<LogRow> read_log(std::istream& in);

// e_r and e_r,tip recomputed from the logged columns alone.
struct RecomputedErrors {
  double radial;
  double tip_radial;
};
RecomputedErrors recompute_errors(const LogRow& row);

}  // namespace polelift
