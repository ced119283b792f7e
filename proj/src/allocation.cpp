#include "polelift/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polelift/error.hpp"

namespace polelift {

AllocationWeights AllocationWeights::literal() {
  AllocationWeights w;
  w.h_slack = 1e13;
  return w;
}

void validate(const AllocationWeights& w) {
  if (!(w.h_main > 0.0 && w.h_aux > 0.0 && w.h_slack > 0.0)) {
    throw std::invalid_argument("allocation weights must be positive");
  }
  if (!(w.slack_bound > 0.0)) throw std::invalid_argument("slack bound must be positive");
}

void validate(const QpProblem& p) {
  const auto m = p.constraint.rows();
  const auto n = p.constraint.cols();
  if (m <= 0 || n < m) throw std::invalid_argument("QP: constraint must be m x n with n >= m > 0");
  if (p.weights.size() != n || p.lower.size() != n || p.upper.size() != n || p.target.size() != m) {
    throw std::invalid_argument("QP: dimension mismatch");
  }
  if (p.constraint.rightCols(m) != Eigen::MatrixXd::Identity(m, m)) {
    throw std::invalid_argument("QP: last m columns of the constraint must be the identity (slack block)");
  }
  if ((p.weights.array() <= 0.0).any()) throw std::invalid_argument("QP: H must be positive definite");
  if ((p.lower.array() >= p.upper.array()).any()) throw std::invalid_argument("QP: need lower < upper");
  if (!p.constraint.allFinite() || !p.target.allFinite()) throw std::invalid_argument("QP: non-finite data");
}

QpProblem build_qp(const AllocationMatrix& a, const Wrench& target, const AllocationWeights& weights,
                   const RotorBounds& bounds) {
  validate(weights);
  constexpr int n = kNumRotors + 6;
  QpProblem p;
  p.constraint.resize(6, n);
  p.constraint << a, Eigen::Matrix<double, 6, 6>::Identity();
  p.weights.resize(n);
  p.lower.resize(n);
  p.upper.resize(n);
  for (int i = 0; i < kNumRotors; ++i) {
    p.weights(i) = bounds.classes[i] == RotorClass::Main ? weights.h_main : weights.h_aux;
    p.lower(i) = bounds.w_min(i);
    p.upper(i) = bounds.w_max(i);
  }
  p.weights.tail<6>().setConstant(weights.h_slack);
  p.lower.tail<6>().setConstant(-weights.slack_bound);
  p.upper.tail<6>().setConstant(weights.slack_bound);
  p.target = target;
  return p;
}

double KktReport::worst() const { return std::max({stationarity, primal, dual, complementarity}); }

KktReport kkt_verify(const QpProblem& p, const Eigen::VectorXd& y) {
  const int n = p.cols();
  const Eigen::VectorXd gap_lo = y - p.lower;
  const Eigen::VectorXd gap_hi = p.upper - y;

  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i) {
    const double tol_lo = 1e-10 * std::max(1.0, std::abs(p.lower(i)));
    const double tol_hi = 1e-10 * std::max(1.0, std::abs(p.upper(i)));
    if (gap_lo(i) > tol_lo && gap_hi(i) > tol_hi) free_idx.push_back(i);
  }

  const Eigen::VectorXd grad = 2.0 * p.weights.cwiseProduct(y);
  KktReport r;
  r.multipliers = Eigen::VectorXd::Zero(p.rows());
  if (!free_idx.empty()) {
    Eigen::MatrixXd ct(free_idx.size(), p.rows());
    Eigen::VectorXd rhs(free_idx.size());
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      ct.row(static_cast<Eigen::Index>(k)) = p.constraint.col(free_idx[k]).transpose();
      rhs(static_cast<Eigen::Index>(k)) = -grad(free_idx[k]);
    }
    r.multipliers = ct.completeOrthogonalDecomposition().solve(rhs);
  }
  const Eigen::VectorXd ct_lambda = p.constraint.transpose() * r.multipliers;
  const Eigen::VectorXd resid = grad + ct_lambda;
  const double scale = std::max({1.0, grad.cwiseAbs().maxCoeff(), ct_lambda.cwiseAbs().maxCoeff()});

  for (int i : free_idx) r.stationarity = std::max(r.stationarity, std::abs(resid(i)) / scale);
  for (int i = 0; i < n; ++i) {
    const bool is_free = std::find(free_idx.begin(), free_idx.end(), i) != free_idx.end();
    if (!is_free) {
      // At a bound: resid = mu_lower - mu_upper; the sign must match the side.
      const bool at_lower = gap_lo(i) <= gap_hi(i);
      const double wrong_sign = at_lower ? std::max(0.0, -resid(i)) : std::max(0.0, resid(i));
      r.dual = std::max(r.dual, wrong_sign / scale);
    }
    const double mu_lo = std::max(resid(i), 0.0);
    const double mu_hi = std::max(-resid(i), 0.0);
    const double range = std::max(1.0, p.upper(i) - p.lower(i));
    const double comp = mu_lo * std::max(gap_lo(i), 0.0) + mu_hi * std::max(gap_hi(i), 0.0);
    r.complementarity = std::max(r.complementarity, comp / (scale * range));
  }

  const double bound_violation =
      std::max({0.0, (-gap_lo).maxCoeff(), (-gap_hi).maxCoeff()});
  r.primal = (p.constraint * y - p.target).cwiseAbs().maxCoeff() + bound_violation;
  return r;
}

QpSolution AllocationSolver::solve(const QpProblem& p) {
  validate(p);
  const int n = p.cols();
  const int m = p.rows();
  const int na = n - m;
  const auto actuators = p.constraint.leftCols(na);

  const bool warm = static_cast<int>(status_.size()) == n && y_.size() == n;
  std::vector<Bound> st(n, Bound::Free);
  Eigen::VectorXd y(n);
  for (int i = 0; i < na; ++i) {
    st[i] = warm ? status_[i] : Bound::Lower;
    if (st[i] == Bound::Lower) {
      y(i) = p.lower(i);
    } else if (st[i] == Bound::Upper) {
      y(i) = p.upper(i);
    } else {
      y(i) = std::clamp(y_(i), p.lower(i), p.upper(i));
    }
  }
  y.tail(m) = p.target - actuators * y.head(na);
  for (int i = na; i < n; ++i) {
    if (y(i) < p.lower(i) || y(i) > p.upper(i)) {
      throw QpError("allocation QP: starting slack outside +-bound; target unreachable within slack bound");
    }
  }

  const Eigen::VectorXd d = p.weights.cwiseSqrt().cwiseInverse();
  const int cap = 10 * n;
  int changes = 0;
  auto bump = [&] {
    if (++changes > cap) {
      throw QpError("allocation QP: active-set change cap (" + std::to_string(cap) + ") exceeded");
    }
  };

  std::vector<int> free_idx;
  free_idx.reserve(n);
  while (true) {
    free_idx.clear();
    Eigen::VectorXd rhs = p.target;
    for (int i = 0; i < n; ++i) {
      if (st[i] == Bound::Free) {
        free_idx.push_back(i);
      } else {
        rhs -= p.constraint.col(i) * y(i);
      }
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    // Minimum-norm solve in scaled variables y~ = H^(1/2) y; avoids forming
    // C H^-1 C', whose condition number is the square of B's.
    Eigen::MatrixXd b(m, nf);
    for (Eigen::Index k = 0; k < nf; ++k) b.col(k) = p.constraint.col(free_idx[k]) * d(free_idx[k]);
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(b);
    const Eigen::VectorXd y_scaled = cod.solve(rhs);

    double alpha = 1.0;
    int blocking = -1;
    Bound blocking_side = Bound::Free;
    for (Eigen::Index k = 0; k < nf; ++k) {
      const int i = free_idx[k];
      const double target = d(i) * y_scaled(k);
      const double step = target - y(i);
      if (target < p.lower(i) && step < 0.0) {
        const double ratio = (p.lower(i) - y(i)) / step;
        if (ratio < alpha) alpha = ratio, blocking = i, blocking_side = Bound::Lower;
      } else if (target > p.upper(i) && step > 0.0) {
        const double ratio = (p.upper(i) - y(i)) / step;
        if (ratio < alpha) alpha = ratio, blocking = i, blocking_side = Bound::Upper;
      }
    }
    if (blocking >= 0) {
      alpha = std::max(alpha, 0.0);
      for (Eigen::Index k = 0; k < nf; ++k) {
        const int i = free_idx[k];
        y(i) += alpha * (d(i) * y_scaled(k) - y(i));
      }
      y(blocking) = blocking_side == Bound::Lower ? p.lower(blocking) : p.upper(blocking);
      st[blocking] = blocking_side;
      bump();
      continue;
    }
    for (Eigen::Index k = 0; k < nf; ++k) y(free_idx[k]) = d(free_idx[k]) * y_scaled(k);

    // Multipliers of the equality from B' lambda = -2 y~.
    const Eigen::VectorXd lambda = b.transpose().completeOrthogonalDecomposition().solve(-2.0 * y_scaled);
    const double tol = 1e-11 * std::max(1.0, 2.0 * y_scaled.cwiseAbs().maxCoeff());
    int release = -1;
    double worst = tol;
    for (int i = 0; i < n; ++i) {
      if (st[i] == Bound::Free) continue;
      const double mu = 2.0 * p.weights(i) * y(i) + p.constraint.col(i).dot(lambda);
      const double violation = (st[i] == Bound::Lower ? -mu : mu) * d(i);
      if (violation > worst) worst = violation, release = i;
    }
    if (release < 0) break;
    st[release] = Bound::Free;
    bump();
  }

  // Slack components: keep the multiplier-consistent value while dormant;
  // once a component carries a real wrench deficit take it from the
  // equality so A w + delta reproduces the target to rounding.
  const Eigen::VectorXd deficit = p.target - actuators * y.head(na);
  const double dormant = 1e-6 * std::max(1.0, p.target.cwiseAbs().maxCoeff());
  for (int j = 0; j < m; ++j) {
    if (st[na + j] == Bound::Free && std::abs(deficit(j)) > dormant) {
      y(na + j) = std::clamp(deficit(j), p.lower(na + j), p.upper(na + j));
    }
  }

  status_ = st;
  y_ = y;

  QpSolution sol;
  sol.y = y;
  sol.active_set_changes = changes;
  sol.kkt = kkt_verify(p, y);
  return sol;
}

QpSolution solve_qp(const QpProblem& p) {
  AllocationSolver solver;
  return solver.solve(p);
}

}  // namespace polelift
