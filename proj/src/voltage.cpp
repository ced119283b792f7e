#include "polelift/voltage.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polelift {

namespace {

std::array<double, VoltageMap::kTerms> monomials(double s, double v) {
  return {1.0, s, v, s * s, s * v, v * v, s * s * s, s * s * v, s * v * v, v * v * v};
}

}  // namespace

double VoltageMap::evaluate(double speed, double voltage) const {
  const auto m = monomials(speed / speed_scale, voltage / voltage_scale);
  double out = 0.0;
  for (int k = 0; k < kTerms; ++k) out += coeffs[k] * m[k];
  return out;
}

VoltageMap fit_voltage_map(std::span<const VoltageSample> samples) {
  if (samples.size() < 16) throw std::invalid_argument("fit_voltage_map: need at least 16 samples");
  VoltageMap map;
  double speed_max = 0.0, voltage_sum = 0.0;
  for (const auto& s : samples) {
    speed_max = std::max(speed_max, std::abs(s.speed));
    voltage_sum += s.voltage;
  }
  map.speed_scale = speed_max > 0.0 ? speed_max : 1.0;
  map.voltage_scale = voltage_sum / static_cast<double>(samples.size());
  if (!(map.voltage_scale > 0.0)) throw std::invalid_argument("fit_voltage_map: voltages must be positive");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, VoltageMap::kTerms);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto m = monomials(samples[i].speed / map.speed_scale, samples[i].voltage / map.voltage_scale);
    for (int k = 0; k < VoltageMap::kTerms; ++k) design(i, k) = m[k];
    target(i) = samples[i].command;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < VoltageMap::kTerms) {
    throw std::invalid_argument("fit_voltage_map: samples do not span speed and voltage (rank " +
                                std::to_string(qr.rank()) + " < 10)");
  }
  const Eigen::VectorXd c = qr.solve(target);
  for (int k = 0; k < VoltageMap::kTerms; ++k) map.coeffs[k] = c(k);
  map.max_residual = (design * c - target).cwiseAbs().maxCoeff();
  return map;
}

CompensatedCommand apply_voltage_compensation(const VoltageMap& map, double desired_speed, double voltage) {
  if (desired_speed <= 0.0) return {0.0, false};
  const double raw = map.evaluate(desired_speed, voltage);
  const double cmd = std::clamp(raw, 0.0, 1.0);
  return {cmd, cmd != raw};
}

std::vector<VoltageSample> synthetic_voltage_samples(double rated_speed, double nominal_voltage, double v_low,
                                                     double v_high, int speed_steps, int voltage_steps) {
  std::vector<VoltageSample> out;
  for (int j = 0; j < voltage_steps; ++j) {
    const double v = v_low + (v_high - v_low) * j / std::max(1, voltage_steps - 1);
    for (int i = 0; i < speed_steps; ++i) {
      const double cmd = 0.05 + 0.95 * i / std::max(1, speed_steps - 1);
      out.push_back({cmd * rated_speed * v / nominal_voltage, v, cmd});
    }
  }
  return out;
}

}  // namespace polelift
