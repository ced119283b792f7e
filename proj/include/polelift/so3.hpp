#pragma once

#include <Eigen/Dense>

namespace polelift {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// A Mat3 that is kept on SO(3). Construction from an arbitrary matrix goes
// through checked() or orthonormalized(); the raw matrix is read-only.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}

  static RotationMatrix identity() { return {}; }
  // Throws std::domain_error if m is not orthonormal with det +1 (tol 1e-9).
  static RotationMatrix checked(const Mat3& m);
  // Nearest rotation in Frobenius norm (polar decomposition).
  static RotationMatrix orthonormalized(const Mat3& m);
  static RotationMatrix about_z(double angle);
  static RotationMatrix from_quaternion(const Eigen::Quaterniond& q);

  const Mat3& matrix() const { return m_; }
  Mat3 transpose() const { return m_.transpose(); }
  Eigen::Quaterniond quaternion() const;

  RotationMatrix operator*(const RotationMatrix& rhs) const;
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  // ||R'R - I||_F
  double orthogonality_error() const;

 private:
  explicit RotationMatrix(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

inline constexpr double kSkewTolerance = 1e-6;

// S such that S * u == v x u.
Mat3 hat(const Vec3& v);

// Inverse of hat. Inputs with a symmetric part up to kSkewTolerance
// (Frobenius) are projected onto their antisymmetric part; larger asymmetry
// throws std::domain_error.
Vec3 vee(const Mat3& s);

// exp((omega * dt)^) by Rodrigues' formula.
RotationMatrix rotation_exp(const Vec3& omega, double dt);

// Roll and pitch (ZYX convention) of R, in radians.
double roll_of(const Mat3& r);
double pitch_of(const Mat3& r);

bool all_finite(const Vec3& v);
bool all_finite(const Mat3& m);

}  // namespace polelift
