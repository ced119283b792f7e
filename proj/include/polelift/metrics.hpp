#pragma once

#include <map>
#include <string>
#include <vector>

#include "polelift/so3.hpp"

namespace polelift {

// e_r = ||diag(1,1,0) e_p||.
double compute_radial_error(const Vec3& e_p);

// Error at the bottom of a pole grasped at its middle:
// e_p,tip = e_p - (L/2) e_R^ z_w.
Vec3 compute_tip_error(const Vec3& e_p, const Vec3& e_R, double length);

struct Aggregate {
  std::size_t count = 0;
  double mean = 0.0;
  double max = 0.0;

  void add(double x);
};

struct PhaseAggregates {
  Aggregate radial;
  Aggregate tip_radial;
  Aggregate roll;   // |roll error| [rad]
  Aggregate pitch;  // |pitch error| [rad]
};

struct MetricSample {
  double t = 0.0;
  std::string phase;
  double radial = 0.0;
  double tip_radial = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
};

// Time series plus per-phase aggregates. Samples must arrive in strictly
// increasing time.
class MetricsRecorder {
 public:
  void add(const MetricSample& s);
  const std::vector<MetricSample>& samples() const { return samples_; }
  const std::map<std::string, PhaseAggregates>& per_phase() const { return per_phase_; }
  const PhaseAggregates& overall() const { return overall_; }

 private:
  std::vector<MetricSample> samples_;
  std::map<std::string, PhaseAggregates> per_phase_;
  PhaseAggregates overall_;
};

}  // namespace polelift
