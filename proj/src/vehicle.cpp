#include "polelift/vehicle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polelift {

namespace {

bool symmetric(const Mat3& m, double tol) { return (m - m.transpose()).norm() <= tol * std::max(1.0, m.norm()); }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Vec3 PropellerSpec::force_per_w() const { return thrust_coeff * axis; }

Vec3 PropellerSpec::torque_per_w() const {
  const double s = spin == SpinDirection::CCW ? 1.0 : -1.0;
  return thrust_coeff * position.cross(axis) + s * drag_coeff * axis;
}

void validate(const PropellerSpec& p, int index) {
  const std::string tag = "propeller " + std::to_string(index) + ": ";
  require(all_finite(p.position) && all_finite(p.axis), tag + "non-finite geometry");
  require(std::abs(p.axis.norm() - 1.0) <= 1e-12, tag + "axis must be a unit vector");
  require(p.thrust_coeff > 0.0, tag + "thrust coefficient must be positive");
  require(p.drag_coeff >= 0.0, tag + "drag coefficient must be non-negative");
  require(p.w_min >= 0.0 && p.w_min < p.w_max, tag + "squared-speed bounds must satisfy 0 <= w_min < w_max");
}

void validate(const VehicleParams& params) {
  require(params.mass > 0.0, "vehicle mass must be positive");
  require(all_finite(params.inertia) && symmetric(params.inertia, 1e-12), "vehicle inertia must be symmetric");
  require(Eigen::LLT<Mat3>(params.inertia).info() == Eigen::Success,
          "vehicle inertia must be positive definite");
  require(all_finite(params.com_offset), "CoM offset must be finite");
  require(params.gravity > 0.0, "gravity must be positive");
  int mains = 0;
  for (int i = 0; i < kNumRotors; ++i) {
    validate(params.propellers[i], i);
    if (params.propellers[i].rotor_class == RotorClass::Main) ++mains;
  }
  require(mains == kNumMain, "vehicle needs exactly 4 main and 4 auxiliary propellers");
}

void validate(const PayloadSpec& load) {
  require(load.mass >= 0.0, "payload mass must be non-negative");
  require(all_finite(load.inertia_com) && symmetric(load.inertia_com, 1e-12), "payload inertia must be symmetric");
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(load.inertia_com);
  require(eig.eigenvalues().minCoeff() >= -1e-12, "payload inertia must be positive semidefinite");
  require(load.length > 0.0, "payload length must be positive");
  require(load.radius > 0.0, "payload radius must be positive");
  require(all_finite(load.grasp_offset), "grasp offset must be finite");
}

AllocationMatrix build_allocation_matrix(const VehicleParams& params) {
  AllocationMatrix a;
  for (int i = 0; i < kNumRotors; ++i) {
    const auto& p = params.propellers[i];
    a.block<3, 1>(0, i) = p.force_per_w();
    a.block<3, 1>(3, i) = p.torque_per_w();
  }
  return a;
}

VehicleParams compose_payload(const VehicleParams& params, const PayloadSpec& load) {
  if (load.mass == 0.0) return params;
  VehicleParams out = params;
  const Mat3 d_hat = hat(load.grasp_offset);
  out.mass = params.mass + load.mass;
  // Parallel-axis shift of the load inertia to the geometric center.
  out.inertia = params.inertia + load.inertia_com - load.mass * d_hat * d_hat;
  out.com_offset = (params.mass * params.com_offset + load.mass * load.grasp_offset) / out.mass;
  return out;
}

VehicleParams remove_payload(const VehicleParams& params, const PayloadSpec& load) {
  if (load.mass == 0.0) return params;
  VehicleParams out = params;
  const Mat3 d_hat = hat(load.grasp_offset);
  out.mass = params.mass - load.mass;
  if (!(out.mass > 0.0)) throw std::invalid_argument("remove_payload: load heavier than composite");
  out.inertia = params.inertia - load.inertia_com + load.mass * d_hat * d_hat;
  out.com_offset = (params.mass * params.com_offset - load.mass * load.grasp_offset) / out.mass;
  return out;
}

Mat3 tube_inertia(double mass, double length, double radius) {
  const double transverse = mass * (radius * radius / 2.0 + length * length / 12.0);
  Mat3 j = Mat3::Zero();
  j(0, 0) = transverse;
  j(1, 1) = transverse;
  j(2, 2) = mass * radius * radius;
  return j;
}

RotorBounds rotor_bounds(const VehicleParams& params) {
  RotorBounds b;
  for (int i = 0; i < kNumRotors; ++i) {
    b.w_min[i] = params.propellers[i].w_min;
    b.w_max[i] = params.propellers[i].w_max;
    b.classes[i] = params.propellers[i].rotor_class;
  }
  return b;
}

double actuation_envelope(const AllocationMatrix& a, const RotorBounds& bounds) {
  double total = 0.0;
  for (int i = 0; i < kNumRotors; ++i) {
    if (bounds.classes[i] == RotorClass::Main) total += a(2, i) * bounds.w_max[i];
  }
  return total;
}

RankReport analyze_rank(const AllocationMatrix& a) {
  // Work with A' (8x6) so the full V of A is available as U of A'.
  Eigen::JacobiSVD<Eigen::Matrix<double, kNumRotors, 6>> svd(a.transpose(), Eigen::ComputeFullU);
  RankReport r;
  r.singular_values.setZero();
  r.singular_values.head<6>() = svd.singularValues();
  const double threshold = 1e-8 * svd.singularValues()(0);
  for (int i = 0; i < 6; ++i) {
    if (svd.singularValues()(i) > threshold) ++r.rank;
  }
  r.nullity = kNumRotors - r.rank;
  r.null_basis = svd.matrixU().rightCols(r.nullity);
  return r;
}

std::array<PropellerSpec, kNumRotors> reference_propellers() {
  constexpr double main_radius = 0.45;
  constexpr double aux_radius = 0.30;
  constexpr double cf_main = 8.0e-5, cm_main = 1.6e-6, wmax_main = 5.55e5;
  constexpr double cf_aux = 1.1e-6, cm_aux = 1.1e-8, wmax_aux = 4.4e6;

  std::array<PropellerSpec, kNumRotors> props{};
  for (int i = 0; i < kNumMain; ++i) {
    const double angle = std::numbers::pi / 4.0 + i * std::numbers::pi / 2.0;
    auto& p = props[i];
    p.position = {main_radius * std::cos(angle), main_radius * std::sin(angle), 0.0};
    p.axis = Vec3::UnitZ();
    p.thrust_coeff = cf_main;
    p.drag_coeff = cm_main;
    p.spin = i % 2 == 0 ? SpinDirection::CCW : SpinDirection::CW;
    p.w_max = wmax_main;
    p.w_min = 0.02 * wmax_main;
    p.rotor_class = RotorClass::Main;
  }
  for (int i = 0; i < 4; ++i) {
    const double angle = i * std::numbers::pi / 2.0;
    const Vec3 radial{std::round(std::cos(angle)), std::round(std::sin(angle)), 0.0};
    auto& p = props[kNumMain + i];
    p.position = aux_radius * radial;
    p.axis = -radial;
    p.thrust_coeff = cf_aux;
    p.drag_coeff = cm_aux;
    p.spin = i % 2 == 0 ? SpinDirection::CCW : SpinDirection::CW;
    p.w_max = wmax_aux;
    p.w_min = 0.02 * wmax_aux;
    p.rotor_class = RotorClass::Auxiliary;
  }
  return props;
}

VehicleParams reference_vehicle() {
  VehicleParams v;
  v.mass = 8.26;
  v.inertia = Eigen::Vector3d(0.45, 0.45, 0.80).asDiagonal();
  v.com_offset = {0.0, 0.0, -0.03};
  v.propellers = reference_propellers();
  v.gravity = 9.81;
  return v;
}

std::string to_string(RotorClass c) { return c == RotorClass::Main ? "main" : "auxiliary"; }
std::string to_string(SpinDirection s) { return s == SpinDirection::CCW ? "ccw" : "cw"; }

}  // namespace polelift
