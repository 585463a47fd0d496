#include "metastate/linprog.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace metastate::linprog {

namespace {

constexpr double kEps = 1e-10;

struct Tableau {
  Eigen::MatrixXd a;       // m x ncols
  Eigen::VectorXd rhs;     // m, kept nonnegative
  std::vector<int> basis;  // basic column per row

  void pivot(int row, int col) {
    double p = a(row, col);
    a.row(row) /= p;
    rhs(row) /= p;
    for (int i = 0; i < a.rows(); ++i) {
      if (i == row) continue;
      double f = a(i, col);
      if (f == 0.0) continue;
      a.row(i) -= f * a.row(row);
      rhs(i) -= f * rhs(row);
    }
    basis[row] = col;
  }
};

enum class Status { kOptimal, kUnbounded };

// Primal simplex with Bland's rule on the given cost vector (maximization).
// `allowed` masks columns that may enter the basis.
Status run_simplex(Tableau& t, const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
  const int m = static_cast<int>(t.a.rows());
  const int n = static_cast<int>(t.a.cols());
  for (long iter = 0;; ++iter) {
    if (iter > 100000)
      throw std::runtime_error("simplex did not terminate on a tiny problem");
    // Reduced costs d_j = c_j - c_B . a_col(j), computed fresh each round;
    // the tableaus here are far too small for this to matter.
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = cost(t.basis[i]);
    int entering = -1;
    for (int j = 0; j < n; ++j) {
      if (!allowed[j]) continue;
      double d = cost(j) - cb.dot(t.a.col(j));
      if (d > kEps) {
        entering = j;
        break;  // Bland: smallest improving index
      }
    }
    if (entering < 0) return Status::kOptimal;
    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double aij = t.a(i, entering);
      if (aij > kEps) {
        double ratio = t.rhs(i) / aij;
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps &&
             (leaving < 0 || t.basis[i] < t.basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) return Status::kUnbounded;
    t.pivot(leaving, entering);
  }
}

}  // namespace

Result solve_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& a_ub,
                 const Eigen::VectorXd& b_ub, const Eigen::MatrixXd& a_eq,
                 const Eigen::VectorXd& b_eq) {
  const int n = static_cast<int>(c.size());
  const int m_ub = static_cast<int>(a_ub.rows());
  const int m_eq = static_cast<int>(a_eq.rows());
  const int m = m_ub + m_eq;

  // Columns: n structural, m_ub slacks, then one artificial per row that
  // needs it (equalities and negated inequality rows).
  std::vector<int> artificial_of_row(m, -1);
  int n_art = 0;
  std::vector<bool> negated(m, false);
  for (int i = 0; i < m_ub; ++i)
    if (b_ub(i) < 0.0) {
      negated[i] = true;
      artificial_of_row[i] = n_art++;
    }
  for (int i = 0; i < m_eq; ++i) artificial_of_row[m_ub + i] = n_art++;

  const int ncols = n + m_ub + n_art;
  Tableau t;
  t.a = Eigen::MatrixXd::Zero(m, ncols);
  t.rhs = Eigen::VectorXd::Zero(m);
  t.basis.assign(m, -1);

  for (int i = 0; i < m_ub; ++i) {
    double sign = negated[i] ? -1.0 : 1.0;
    t.a.block(i, 0, 1, n) = sign * a_ub.row(i);
    t.a(i, n + i) = sign;  // slack
    t.rhs(i) = sign * b_ub(i);
  }
  for (int i = 0; i < m_eq; ++i) {
    double sign = b_eq(i) < 0.0 ? -1.0 : 1.0;
    t.a.block(m_ub + i, 0, 1, n) = sign * a_eq.row(i);
    t.rhs(m_ub + i) = sign * b_eq(i);
  }
  for (int i = 0; i < m; ++i) {
    if (artificial_of_row[i] >= 0) {
      t.a(i, n + m_ub + artificial_of_row[i]) = 1.0;
      t.basis[i] = n + m_ub + artificial_of_row[i];
    } else {
      t.basis[i] = n + i;  // slack
    }
  }

  Result result;
  std::vector<bool> allowed(ncols, true);

  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols);
    for (int j = n + m_ub; j < ncols; ++j) phase1(j) = -1.0;
    run_simplex(t, phase1, allowed);  // bounded by construction
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i)
      if (t.basis[i] >= n + m_ub) infeasibility += t.rhs(i);
    if (infeasibility > 1e-8) {
      result.feasible = false;
      return result;
    }
    // Pivot remaining zero-level artificials out of the basis when possible.
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < n + m_ub) continue;
      int col = -1;
      for (int j = 0; j < n + m_ub; ++j)
        if (std::abs(t.a(i, j)) > kEps) {
          col = j;
          break;
        }
      if (col >= 0) t.pivot(i, col);
    }
    for (int j = n + m_ub; j < ncols; ++j) allowed[j] = false;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols);
  cost.head(n) = c;
  Status s = run_simplex(t, cost, allowed);

  result.feasible = true;
  result.bounded = (s == Status::kOptimal);
  result.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (t.basis[i] < n) result.x(t.basis[i]) = t.rhs(i);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace metastate::linprog
