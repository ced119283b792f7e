#pragma once

#include <vector>

#include "polelift/vehicle.hpp"

namespace polelift {

// Diagonal weights of y'Hy over y = (w_main, w_aux, delta).
//
// The slack weight is unit_scale^2 * priority: squared speeds are about
// 1e6 times larger than wrench residuals in N / N m, and the quadratic form
// needs that factor squared before the 1e7 priority is applied.
struct AllocationWeights {
  double h_main = 1.0;
  double h_aux = 4.0;
  double h_slack = 1e19;
  double slack_bound = 1e6;  // zeta

  // Slack weight 1e13 applied directly to delta^2 (no squared unit scale).
  static AllocationWeights literal();
};

void validate(const AllocationWeights& w);

// min y'Hy  s.t.  C y = target,  lower <= y <= upper, H = diag(weights).
// The last m columns of C must be the identity (slack block), which makes
// every instance feasible for a large enough slack bound.
struct QpProblem {
  Eigen::MatrixXd constraint;  // C = [A | I], m x n
  Eigen::VectorXd weights;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd target;

  int rows() const { return static_cast<int>(constraint.rows()); }
  int cols() const { return static_cast<int>(constraint.cols()); }
  int num_actuators() const { return cols() - rows(); }
  double objective(const Eigen::VectorXd& y) const { return y.dot(weights.cwiseProduct(y)); }
};

void validate(const QpProblem& p);

// Builds the 6x14 allocation problem; columns are ordered as in the
// allocation matrix (mains first in the shipped geometry) and each rotor's
// weight follows its class.
QpProblem build_qp(const AllocationMatrix& a, const Wrench& target, const AllocationWeights& weights,
                   const RotorBounds& bounds);

// Residuals of the optimality conditions
//   2Hy + C'lambda - mu_lower + mu_upper = 0,  Cy = target,
//   lower <= y <= upper,  mu >= 0,  mu_i * gap_i = 0.
// Stationarity, dual infeasibility and complementarity are relative to
// max(1, |2Hy|_inf, |C'lambda|_inf); primal is the absolute equality
// residual plus any bound violation.
struct KktReport {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  Eigen::VectorXd multipliers;  // lambda, estimated from the free coordinates

  double worst() const;
};

KktReport kkt_verify(const QpProblem& p, const Eigen::VectorXd& y);

struct QpSolution {
  Eigen::VectorXd y;
  int active_set_changes = 0;
  KktReport kkt;

  Eigen::VectorXd actuators(const QpProblem& p) const { return y.head(p.num_actuators()); }
  Eigen::VectorXd slack(const QpProblem& p) const { return y.tail(p.rows()); }
};

// Primal active-set solver for diagonal H, one equality block and box
// bounds. Holds the previous working set for warm starts; one instance per
// control loop.
class AllocationSolver {
 public:
  QpSolution solve(const QpProblem& p);
  void reset() { status_.clear(); y_.resize(0); }

 private:
  enum class Bound : signed char { Free = 0, Lower = -1, Upper = 1 };
  std::vector<Bound> status_;
  Eigen::VectorXd y_;
};

// Cold-start solve.
QpSolution solve_qp(const QpProblem& p);

}  // namespace polelift
