#pragma once

#include <array>

#include "polelift/controller.hpp"
#include "polelift/so3.hpp"

namespace polelift {

// Rest-to-rest degree-9 segment: endpoint positions given, velocity,
// acceleration, jerk and snap zero at both ends.
struct PolySegment {
  static constexpr int kDegree = 9;
  // coeffs[axis][k] multiplies t^k, t in [0, duration].
  std::array<std::array<double, kDegree + 1>, 3> coeffs{};
  double duration = 1.0;
  double yaw_start = 0.0;
  double yaw_end = 0.0;

  // d-th time derivative (d = 0..4) at t, no clamping.
  Vec3 derivative(int d, double t) const;
  Vec3 start() const { return derivative(0, 0.0); }
  Vec3 end() const { return derivative(0, duration); }
};

// Normalized rest-to-rest profile s -> 126s^5 - 420s^6 + 540s^7 - 315s^8 + 70s^9.
double smoothstep9(double s);

PolySegment fit_poly9(const Vec3& p0, const Vec3& p1, double duration, double yaw0 = 0.0, double yaw1 = 0.0);

// Flat-attitude setpoint. t outside [0, T] is clamped to the nearest end
// with zero derivatives.
Setpoint sample_setpoint(const PolySegment& seg, double t);

// Peak |second derivative| of the normalized profile (s in [0, 1]).
double smoothstep9_peak_acceleration();

// Duration for a rest-to-rest move of `distance`: the longer of the
// average-speed time and the time that keeps peak acceleration at a_max.
double segment_duration(double distance, double average_speed, double max_acceleration, double min_duration);

}  // namespace polelift
