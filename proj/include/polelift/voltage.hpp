#pragma once

#include <array>
#include <span>
#include <vector>

namespace polelift {

struct VoltageSample {
  double speed;    // rotor speed [rad/s]
  double voltage;  // [V]
  double command;  // ESC command fraction in [0, 1]
};

// Bivariate cubic command = sum c_ij s^i v^j (i + j <= 3) in the normalized
// variables s = speed / speed_scale and v = voltage / voltage_scale.
struct VoltageMap {
  static constexpr int kTerms = 10;
  std::array<double, kTerms> coeffs{};
  double speed_scale = 1.0;
  double voltage_scale = 1.0;
  double max_residual = 0.0;  // max |fit - command| over the training samples

  double evaluate(double speed, double voltage) const;
};

// Least-squares fit. Requires at least 16 samples; throws
// std::invalid_argument when the design matrix is rank deficient.
VoltageMap fit_voltage_map(std::span<const VoltageSample> samples);

struct CompensatedCommand {
  double command = 0.0;
  bool clamped = false;
};

// Command fraction that reaches `desired_speed` at supply `voltage`.
// Zero speed maps to zero; results are clamped to [0, 1].
CompensatedCommand apply_voltage_compensation(const VoltageMap& map, double desired_speed, double voltage);

// Synthetic calibration data from the simulated ESC law
// omega = cmd * rated_speed * V / V_nom, on a regular grid.
std::vector<VoltageSample> synthetic_voltage_samples(double rated_speed, double nominal_voltage, double v_low,
                                                     double v_high, int speed_steps = 12, int voltage_steps = 8);

}  // namespace polelift
