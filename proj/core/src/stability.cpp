#include "metastate/stability.hpp"

#include <cmath>
#include <limits>

#include "metastate/errors.hpp"
#include "metastate/linprog.hpp"

namespace metastate {

StabilityVector stability_vector_direct(const ModelSpec& model, const Minimizer& minimizer) {
  const Index L = model.num_types();
  std::vector<double> grad =
      model.interaction().gradient(minimizer.total_measure.entries());
  std::vector<double> b_raw(L);
  for (Index b = 0; b < L; ++b) {
    const ProbabilityVector& row = minimizer.profile.row(b);
    double mean_df = 0.0;
    for (Index a = 0; a < model.num_spins(); ++a) mean_df += grad[a] * row[a];
    b_raw[b] = -(mean_df + relative_entropy(row, model.alpha(b)));
  }
  return TangentVector::centered(std::move(b_raw));
}

namespace {

// log sum_a exp(-dF_nu(a)) alpha[b](a) for every b, stabilized by the max of
// -dF so the result is exact under constant shifts of the gradient.
std::vector<double> log_normalizers(const ModelSpec& model, const ProbabilityVector& nu) {
  std::vector<double> grad = model.interaction().gradient(nu.entries());
  double top = -grad[0];
  for (Index a = 1; a < grad.size(); ++a) top = std::max(top, -grad[a]);
  std::vector<double> out(model.num_types());
  for (Index b = 0; b < model.num_types(); ++b) {
    const ProbabilityVector& a = model.alpha(b);
    double z = 0.0;
    for (Index s = 0; s < a.dim(); ++s) z += std::exp(-grad[s] - top) * a[s];
    out[b] = std::log(z) + top;
  }
  return out;
}

}  // namespace

StabilityVector stability_vector_partition(const ModelSpec& model,
                                           const ProbabilityVector& nu) {
  return TangentVector::centered(log_normalizers(model, nu));
}

double stability_centering_constant(const ModelSpec& model, const ProbabilityVector& nu) {
  std::vector<double> z = log_normalizers(model, nu);
  double mean = 0.0;
  for (double v : z) mean += v;
  return mean / static_cast<double>(z.size());
}

NonDegeneracy2Diagnostics check_nondegeneracy2(std::span<const StabilityVector> vectors,
                                               double pair_tolerance) {
  if (vectors.empty()) throw ValidationError("need at least one stability vector");
  NonDegeneracy2Diagnostics diag;
  diag.min_pairwise_distance = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < vectors.size(); ++i) {
    for (Index j = i + 1; j < vectors.size(); ++j) {
      double d = sup_distance(vectors[i], vectors[j]);
      if (d < diag.min_pairwise_distance) {
        diag.min_pairwise_distance = d;
        diag.closest_first = i;
        diag.closest_second = j;
      }
    }
  }
  if (vectors.size() >= 2 && diag.min_pairwise_distance <= pair_tolerance)
    throw NonDegeneracy2Violation(
        "two minimizers share the same stability vector; weights are undefined",
        diag.closest_first, diag.closest_second, diag.min_pairwise_distance);
  return diag;
}

namespace {

VisibilityCertificate classify_one(std::span<const StabilityVector> vectors, Index j,
                                   double lp_tolerance) {
  const Index k = vectors.size();
  const Index d = vectors[0].dim();
  VisibilityCertificate cert;

  if (k == 1) {
    // No competitor: the stability region is the whole tangent space.
    cert.visible = true;
    cert.witness = TangentVector::zero(d);
    cert.margin = std::nullopt;
    return cert;
  }

  // max t  s.t.  <x, B_j - B_i> >= t  for i != j,  |x|_inf <= 1,
  // in variables y = x + 1 in [0,2]^d and t = tp - tm.
  const int nvars = static_cast<int>(d) + 2;
  const int nrows = static_cast<int>(k - 1 + d);
  Eigen::MatrixXd a_ub = Eigen::MatrixXd::Zero(nrows, nvars);
  Eigen::VectorXd b_ub = Eigen::VectorXd::Zero(nrows);
  int r = 0;
  for (Index i = 0; i < k; ++i) {
    if (i == j) continue;
    for (Index b = 0; b < d; ++b) a_ub(r, static_cast<int>(b)) = -(vectors[j][b] - vectors[i][b]);
    a_ub(r, static_cast<int>(d)) = 1.0;       // t+
    a_ub(r, static_cast<int>(d) + 1) = -1.0;  // t-
    b_ub(r) = 0.0;                            // <1, B_j - B_i> = 0 on the tangent space
    ++r;
  }
  for (Index b = 0; b < d; ++b) {
    a_ub(r, static_cast<int>(b)) = 1.0;
    b_ub(r) = 2.0;
    ++r;
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvars);
  c(static_cast<int>(d)) = 1.0;
  c(static_cast<int>(d) + 1) = -1.0;

  linprog::Result lp = linprog::solve_max(c, a_ub, b_ub, Eigen::MatrixXd(0, nvars),
                                          Eigen::VectorXd(0));
  if (!lp.feasible || !lp.bounded)
    throw std::runtime_error("visibility LP failed; this signals a bug");

  // Re-derive the witness and its margin from the solution directly.
  std::vector<double> x_raw(d);
  for (Index b = 0; b < d; ++b) x_raw[b] = lp.x(static_cast<int>(b)) - 1.0;
  TangentVector witness = TangentVector::centered(std::move(x_raw));
  double margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < k; ++i) {
    if (i == j) continue;
    double gap = 0.0;
    for (Index b = 0; b < d; ++b) gap += witness[b] * (vectors[j][b] - vectors[i][b]);
    margin = std::min(margin, gap);
  }

  if (margin > lp_tolerance) {
    cert.visible = true;
    cert.witness = witness;
    cert.margin = margin;
    return cert;
  }

  // Not extreme: recover convex weights lambda with sum lambda = 1 and
  // sum_i lambda_i B_i = B_j, allowing a minimal slack that is reported.
  const int nl = static_cast<int>(k - 1);
  const int ns = static_cast<int>(2 * d);
  Eigen::MatrixXd a_eq = Eigen::MatrixXd::Zero(static_cast<int>(d) + 1, nl + ns);
  Eigen::VectorXd b_eq = Eigen::VectorXd::Zero(static_cast<int>(d) + 1);
  int col = 0;
  for (Index i = 0; i < k; ++i) {
    if (i == j) continue;
    for (Index b = 0; b < d; ++b) a_eq(static_cast<int>(b), col) = vectors[i][b];
    a_eq(static_cast<int>(d), col) = 1.0;
    ++col;
  }
  for (Index b = 0; b < d; ++b) {
    a_eq(static_cast<int>(b), nl + 2 * static_cast<int>(b)) = -1.0;  // s+
    a_eq(static_cast<int>(b), nl + 2 * static_cast<int>(b) + 1) = 1.0;  // s-
    b_eq(static_cast<int>(b)) = vectors[j][b];
  }
  b_eq(static_cast<int>(d)) = 1.0;
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(nl + ns);
  for (int s = 0; s < ns; ++s) c2(nl + s) = -1.0;
  linprog::Result comb = linprog::solve_max(c2, Eigen::MatrixXd(0, nl + ns),
                                            Eigen::VectorXd(0), a_eq, b_eq);
  if (!comb.feasible || !comb.bounded)
    throw std::runtime_error("convex combination LP failed; this signals a bug");

  cert.visible = false;
  cert.witness = witness;
  cert.margin = margin;
  cert.combination.assign(k, 0.0);
  col = 0;
  for (Index i = 0; i < k; ++i) {
    if (i == j) continue;
    cert.combination[i] = comb.x(col++);
  }
  double err = 0.0;
  for (Index b = 0; b < d; ++b) {
    double s = 0.0;
    for (Index i = 0; i < k; ++i) s += cert.combination[i] * vectors[i][b];
    err = std::max(err, std::abs(s - vectors[j][b]));
  }
  cert.combination_error = err;
  return cert;
}

}  // namespace

VisibilityReport visibility(std::span<const StabilityVector> vectors, double lp_tolerance) {
  if (vectors.empty()) throw ValidationError("need at least one stability vector");
  const Index d = vectors[0].dim();
  for (const auto& v : vectors)
    if (v.dim() != d) throw ValidationError("stability vector dimension mismatch");

  VisibilityReport report;
  report.lp_tolerance = lp_tolerance;
  report.min_pairwise_distance = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < vectors.size(); ++i)
    for (Index j = i + 1; j < vectors.size(); ++j)
      report.min_pairwise_distance =
          std::min(report.min_pairwise_distance, sup_distance(vectors[i], vectors[j]));

  report.entries.reserve(vectors.size());
  for (Index j = 0; j < vectors.size(); ++j)
    report.entries.push_back(classify_one(vectors, j, lp_tolerance));
  return report;
}

}  // namespace metastate
