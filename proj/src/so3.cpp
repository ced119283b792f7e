#include "polelift/so3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polelift {

RotationMatrix RotationMatrix::checked(const Mat3& m) {
  if (!all_finite(m)) throw std::domain_error("rotation matrix has non-finite entries");
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  const double det = m.determinant();
  if (ortho > 1e-9 || std::abs(det - 1.0) > 1e-9) {
    throw std::domain_error("matrix is not a proper rotation (||R'R-I||=" +
                            std::to_string(ortho) + ", det=" + std::to_string(det) + ")");
  }
  return RotationMatrix(m);
}

RotationMatrix RotationMatrix::orthonormalized(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return RotationMatrix(u * v.transpose());
}

RotationMatrix RotationMatrix::about_z(double angle) {
  Mat3 m;
  const double c = std::cos(angle), s = std::sin(angle);
  m << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return RotationMatrix(m);
}

RotationMatrix RotationMatrix::from_quaternion(const Eigen::Quaterniond& q) {
  return orthonormalized(q.normalized().toRotationMatrix());
}

Eigen::Quaterniond RotationMatrix::quaternion() const {
  Eigen::Quaterniond q(m_);
  q.normalize();
  // Canonical sign: w >= 0.
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

RotationMatrix RotationMatrix::operator*(const RotationMatrix& rhs) const {
  return RotationMatrix(m_ * rhs.m_);
}

double RotationMatrix::orthogonality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Mat3 hat(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& s) {
  const Mat3 sym = 0.5 * (s + s.transpose());
  if (sym.norm() > kSkewTolerance) {
    throw std::domain_error("vee: matrix is not skew-symmetric (symmetric part " +
                            std::to_string(sym.norm()) + ")");
  }
  const Mat3 a = 0.5 * (s - s.transpose());
  return {a(2, 1), a(0, 2), a(1, 0)};
}

RotationMatrix rotation_exp(const Vec3& omega, double dt) {
  if (dt < 0.0) throw std::invalid_argument("rotation_exp: dt must be non-negative");
  const Vec3 phi = omega * dt;
  const double theta = phi.norm();
  const Mat3 k = hat(phi);
  double a, b;
  if (theta < 1e-6) {
    // Series of sin(t)/t and (1-cos t)/t^2.
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return RotationMatrix::orthonormalized(Mat3::Identity() + a * k + b * k * k);
}

double roll_of(const Mat3& r) { return std::atan2(r(2, 1), r(2, 2)); }

double pitch_of(const Mat3& r) { return std::asin(std::clamp(-r(2, 0), -1.0, 1.0)); }

bool all_finite(const Vec3& v) { return v.allFinite(); }
bool all_finite(const Mat3& m) { return m.allFinite(); }

}  // namespace polelift
