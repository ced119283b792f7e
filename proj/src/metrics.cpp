#include "polelift/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace polelift {

double compute_radial_error(const Vec3& e_p) { return std::hypot(e_p.x(), e_p.y()); }

Vec3 compute_tip_error(const Vec3& e_p, const Vec3& e_R, double length) {
  return e_p - 0.5 * length * hat(e_R) * Vec3::UnitZ();
}

void Aggregate::add(double x) {
  ++count;
  mean += (x - mean) / static_cast<double>(count);
  if (count == 1 || x > max) max = x;
}

void MetricsRecorder::add(const MetricSample& s) {
  if (!samples_.empty() && !(s.t > samples_.back().t)) {
    throw std::invalid_argument("metrics: samples must be strictly increasing in time");
  }
  samples_.push_back(s);
  for (PhaseAggregates* agg : {&per_phase_[s.phase], &overall_}) {
    agg->radial.add(s.radial);
    agg->tip_radial.add(s.tip_radial);
    agg->roll.add(std::abs(s.roll));
    agg->pitch.add(std::abs(s.pitch));
  }
}

}  // namespace polelift
