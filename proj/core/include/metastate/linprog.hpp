#pragma once

#include <Eigen/Dense>

namespace metastate::linprog {

struct Result {
  bool feasible = false;
  bool bounded = true;
  double objective = 0.0;
  Eigen::VectorXd x;
};

/// Maximizes c.x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.
/// Dense two-phase tableau simplex with Bland's rule; intended for the tiny
/// LPs of the visibility test (tens of rows at most).
Result solve_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_ub,
                 const Eigen::VectorXd& b_ub, const Eigen::MatrixXd& a_eq,
                 const Eigen::VectorXd& b_eq);

}  // namespace metastate::linprog
