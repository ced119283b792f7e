#include "polelift/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polelift {

namespace {

constexpr std::array<double, 10> kProfile{0.0, 0.0, 0.0, 0.0, 0.0, 126.0, -420.0, 540.0, -315.0, 70.0};

// k! / (k - d)!
double falling(int k, int d) {
  double out = 1.0;
  for (int j = 0; j < d; ++j) out *= k - j;
  return out;
}

}  // namespace

double smoothstep9(double s) {
  double out = 0.0;
  for (int k = 9; k >= 0; --k) out = out * s + kProfile[k];
  return out;
}

Vec3 PolySegment::derivative(int d, double t) const {
  Vec3 out = Vec3::Zero();
  for (int axis = 0; axis < 3; ++axis) {
    double acc = 0.0;
    for (int k = kDegree; k >= d; --k) acc = acc * t + falling(k, d) * coeffs[axis][k];
    out(axis) = acc;
  }
  return out;
}

PolySegment fit_poly9(const Vec3& p0, const Vec3& p1, double duration, double yaw0, double yaw1) {
  if (!(duration > 0.0)) throw std::invalid_argument("fit_poly9: duration must be positive");
  PolySegment seg;
  seg.duration = duration;
  seg.yaw_start = yaw0;
  seg.yaw_end = yaw1;
  const Vec3 delta = p1 - p0;
  for (int axis = 0; axis < 3; ++axis) {
    seg.coeffs[axis][0] = p0(axis);
    for (int k = 1; k <= PolySegment::kDegree; ++k) {
      seg.coeffs[axis][k] = delta(axis) * kProfile[k] / std::pow(duration, k);
    }
  }
  return seg;
}

Setpoint sample_setpoint(const PolySegment& seg, double t) {
  Setpoint sp;
  if (t <= 0.0 || t >= seg.duration) {
    const bool at_end = t >= seg.duration;
    sp.position = at_end ? seg.end() : seg.start();
    sp.yaw = at_end ? seg.yaw_end : seg.yaw_start;
  } else {
    sp.position = seg.derivative(0, t);
    sp.velocity = seg.derivative(1, t);
    sp.acceleration = seg.derivative(2, t);
    sp.yaw = seg.yaw_start + (seg.yaw_end - seg.yaw_start) * t / seg.duration;
    sp.angular_velocity.z() = (seg.yaw_end - seg.yaw_start) / seg.duration;
  }
  sp.attitude = RotationMatrix::about_z(sp.yaw);
  return sp;
}

double smoothstep9_peak_acceleration() {
  // Dense scan of the 2nd derivative; the peak is interior and smooth.
  double peak = 0.0;
  constexpr int kSteps = 20000;
  for (int i = 0; i <= kSteps; ++i) {
    const double s = static_cast<double>(i) / kSteps;
    double acc = 0.0;
    for (int k = 9; k >= 2; --k) acc = acc * s + falling(k, 2) * kProfile[k];
    peak = std::max(peak, std::abs(acc));
  }
  return peak;
}

double segment_duration(double distance, double average_speed, double max_acceleration, double min_duration) {
  static const double peak = smoothstep9_peak_acceleration();
  const double by_speed = distance / average_speed;
  const double by_accel = std::sqrt(peak * distance / max_acceleration);
  return std::max({by_speed, by_accel, min_duration});
}

}  // namespace polelift
