#pragma once

#include <array>
#include <span>
#include <string>

#include "polelift/so3.hpp"

namespace polelift {

inline constexpr int kNumRotors = 8;
inline constexpr int kNumMain = 4;

enum class SpinDirection { CW, CCW };
enum class RotorClass { Main, Auxiliary };

// One propeller. Bounds are on the squared speed w = omega^2 [rad^2/s^2].
struct PropellerSpec {
  Vec3 position = Vec3::Zero();        // r_b,i [m]
  Vec3 axis = Vec3::UnitZ();           // xi_b,i, unit
  double thrust_coeff = 0.0;           // c_f [N s^2/rad^2]
  double drag_coeff = 0.0;             // c_M [N m s^2/rad^2]
  SpinDirection spin = SpinDirection::CCW;
  double w_min = 0.0;
  double w_max = 0.0;
  RotorClass rotor_class = RotorClass::Main;

  // Force per unit squared speed, beta = c_f xi.
  Vec3 force_per_w() const;
  // Torque about the geometric center per unit squared speed,
  // gamma = c_f r x xi + s c_M xi with s = +1 for CCW, -1 for CW.
  Vec3 torque_per_w() const;
};

struct VehicleParams {
  double mass = 0.0;                   // [kg]
  Mat3 inertia = Mat3::Identity();     // about the geometric center, body axes [kg m^2]
  Vec3 com_offset = Vec3::Zero();      // x_com [m]
  std::array<PropellerSpec, kNumRotors> propellers{};
  double gravity = 9.81;               // [m/s^2]

  Vec3 gravity_world() const { return {0.0, 0.0, gravity}; }
};

struct PayloadSpec {
  double mass = 0.0;                          // m_load [kg]
  Mat3 inertia_com = Mat3::Zero();            // J_com,load [kg m^2]
  Vec3 grasp_offset = Vec3::Zero();           // d, body frame [m]
  double length = 0.0;                        // L [m]
  double radius = 0.0;                        // r [m]
};

using AllocationMatrix = Eigen::Matrix<double, 6, kNumRotors>;
using Wrench = Eigen::Matrix<double, 6, 1>;
using RotorVector = Eigen::Matrix<double, kNumRotors, 1>;

// Throws std::invalid_argument naming the first violated invariant.
void validate(const PropellerSpec& p, int index);
void validate(const VehicleParams& params);
void validate(const PayloadSpec& load);

// Column i is (beta_i; gamma_i).
AllocationMatrix build_allocation_matrix(const VehicleParams& params);

VehicleParams compose_payload(const VehicleParams& params, const PayloadSpec& load);
// Inverse of compose_payload for the same load.
VehicleParams remove_payload(const VehicleParams& params, const PayloadSpec& load);

// Thin-walled tube about its own center of mass, axis along z.
Mat3 tube_inertia(double mass, double length, double radius);

struct RotorBounds {
  RotorVector w_min = RotorVector::Zero();
  RotorVector w_max = RotorVector::Zero();
  std::array<RotorClass, kNumRotors> classes{};
};

RotorBounds rotor_bounds(const VehicleParams& params);

// Sum of main-rotor force at w_max projected on body z [N].
double actuation_envelope(const AllocationMatrix& a, const RotorBounds& bounds);

// Numerical rank / nullity of A from its singular values (threshold
// 1e-8 * sigma_max).
struct RankReport {
  int rank = 0;
  int nullity = 0;
  Eigen::Matrix<double, kNumRotors, 1> singular_values = Eigen::Matrix<double, kNumRotors, 1>::Zero();
  Eigen::Matrix<double, kNumRotors, Eigen::Dynamic> null_basis;
};
RankReport analyze_rank(const AllocationMatrix& a);

// Geometry used by the shipped scenarios: 4 mains in X at 0.45 m with +z
// axes and alternating spin, 4 auxiliaries at 0.30 m on +-x/+-y with radial
// in-plane axes pointing inward. Propeller order: mains first.
std::array<PropellerSpec, kNumRotors> reference_propellers();
VehicleParams reference_vehicle();

std::string to_string(RotorClass c);
std::string to_string(SpinDirection s);

}  // namespace polelift
