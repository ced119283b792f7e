#pragma once
// Reference for  min y'Hy  s.t.  Cy = u, lo <= y <= hi  (H diagonal):
// accelerated gradient ascent on the Lagrangian dual. For fixed lambda the
// inner minimization over the box is separable, so the projection is the
// clip in y(lambda). The dual value is a lower bound on the primal optimum
// (weak duality), which makes the comparison one-sided-safe.
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace oracle {

struct DualResult {
  Eigen::VectorXd lambda;
  Eigen::VectorXd y;          // y(lambda), box feasible, Cy ~ u
  double dual_value = 0.0;    // g(lambda) <= optimum
  double residual = 0.0;      // ||u - C y(lambda)||_inf
  int iterations = 0;
};

inline Eigen::VectorXd inner(const Eigen::MatrixXd& c, const Eigen::VectorXd& h, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const Eigen::VectorXd& lambda) {
  Eigen::VectorXd y = (c.transpose() * lambda).cwiseQuotient(2.0 * h);
  return y.cwiseMax(lo).cwiseMin(hi);
}

inline double dual_value(const Eigen::MatrixXd& c, const Eigen::VectorXd& h, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& y, const Eigen::VectorXd& lambda) {
  return y.dot(h.cwiseProduct(y)) + lambda.dot(u - c * y);
}

inline DualResult solve_dual(const Eigen::MatrixXd& c, const Eigen::VectorXd& h, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, const Eigen::VectorXd& u, int max_iter = 200000,
                             double tol = 1e-13) {
  const int m = static_cast<int>(c.rows());
  // Precondition with the unconstrained dual Hessian M = C H^-1 C' / 2.
  const Eigen::MatrixXd mm = c * h.cwiseInverse().asDiagonal() * c.transpose() / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mm);
  const Eigen::MatrixXd p = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose();

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(m), prev = mu, z = mu;
  double tk = 1.0;
  DualResult r;
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  for (int k = 0; k < max_iter; ++k) {
    const Eigen::VectorXd y = inner(c, h, lo, hi, p * z);
    const Eigen::VectorXd grad = p.transpose() * (u - c * y);
    prev = mu;
    mu = z + grad;  // step 1/L with L <= 1 after preconditioning
    const Eigen::VectorXd ym = inner(c, h, lo, hi, p * mu);
    const double res = (u - c * ym).cwiseAbs().maxCoeff();
    r.iterations = k + 1;
    if (res < tol * scale) break;
    // Adaptive restart when momentum points downhill.
    if (grad.dot(mu - prev) < 0.0) {
      tk = 1.0;
      z = mu;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    z = mu + ((tk - 1.0) / tn) * (mu - prev);
    tk = tn;
  }
  r.lambda = p * mu;
  r.y = inner(c, h, lo, hi, r.lambda);
  r.dual_value = dual_value(c, h, u, r.y, r.lambda);
  r.residual = (u - c * r.y).cwiseAbs().maxCoeff();
  return r;
}

// Same dual, but the metric is rebuilt from the current free set every step
// (M_F = C_F H_F^-1 C_F' / 2), with backtracking on the dual value. Needed
// when the slack carries a residual: the slack columns then dominate the
// curvature and a fixed metric stalls.
inline DualResult solve_dual_variable_metric(const Eigen::MatrixXd& c, const Eigen::VectorXd& h,
                                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                             const Eigen::VectorXd& u, int max_iter = 500, double tol = 1e-13) {
  const int m = static_cast<int>(c.rows());
  const int n = static_cast<int>(c.cols());
  DualResult warm = solve_dual(c, h, lo, hi, u, 2000, tol);
  Eigen::VectorXd lambda = warm.lambda;
  Eigen::VectorXd y = inner(c, h, lo, hi, lambda);
  double g = dual_value(c, h, u, y, lambda);
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  DualResult r;
  r.iterations = warm.iterations;
  for (int k = 0; k < max_iter && (u - c * y).cwiseAbs().maxCoeff() >= tol * scale; ++k) {
    Eigen::MatrixXd mf = Eigen::MatrixXd::Zero(m, m);
    const Eigen::VectorXd raw = (c.transpose() * lambda).cwiseQuotient(2.0 * h);
    for (int i = 0; i < n; ++i) {
      if (raw(i) > lo(i) && raw(i) < hi(i)) mf += c.col(i) * c.col(i).transpose() / (2.0 * h(i));
    }
    const Eigen::VectorXd step = mf.ldlt().solve(u - c * y);
    double t = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      const Eigen::VectorXd cand = lambda + t * step;
      const Eigen::VectorXd yc = inner(c, h, lo, hi, cand);
      const double gc = dual_value(c, h, u, yc, cand);
      if (gc >= g) {
        lambda = cand;
        y = yc;
        g = gc;
        moved = true;
        break;
      }
    }
    ++r.iterations;
    if (!moved) break;
  }
  r.lambda = lambda;
  r.y = y;
  r.dual_value = g;
  r.residual = (u - c * y).cwiseAbs().maxCoeff();
  return r;
}

}  // namespace oracle
