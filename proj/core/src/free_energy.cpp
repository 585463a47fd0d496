#include "metastate/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "metastate/errors.hpp"
#include "metastate/parallel.hpp"
#include "metastate/rng.hpp"

namespace metastate {

Profile::Profile(std::vector<ProbabilityVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ValidationError("profile must have at least one row");
  for (const auto& r : rows_)
    if (r.dim() != rows_[0].dim()) throw ValidationError("profile rows differ in dimension");
}

ProbabilityVector Profile::total_measure(const ProbabilityVector& pi) const {
  if (pi.dim() != num_types()) throw ValidationError("pi dimension mismatch");
  std::vector<double> total(num_spins(), 0.0);
  for (Index b = 0; b < num_types(); ++b)
    for (Index a = 0; a < num_spins(); ++a) total[a] += pi[b] * rows_[b][a];
  return ProbabilityVector(std::move(total));
}

bool Profile::strictly_interior() const {
  return std::all_of(rows_.begin(), rows_.end(),
                     [](const ProbabilityVector& r) { return r.strictly_positive(); });
}

Profile Profile::constant(const ProbabilityVector& row, Index num_types) {
  return Profile(std::vector<ProbabilityVector>(num_types, row));
}

double sup_distance(const Profile& a, const Profile& b) {
  if (a.num_types() != b.num_types() || a.num_spins() != b.num_spins())
    throw ValidationError("profile shape mismatch");
  double d = 0.0;
  for (Index i = 0; i < a.num_types(); ++i)
    d = std::max(d, sup_distance(a.row(i), b.row(i)));
  return d;
}

double phi(const ModelSpec& model, const ProbabilityVector& pi_hat, const Profile& profile) {
  if (pi_hat.dim() != model.num_types() || profile.num_types() != model.num_types() ||
      profile.num_spins() != model.num_spins())
    throw ValidationError("phi: shape mismatch");
  double value = model.interaction().value(profile.total_measure(pi_hat).entries());
  for (Index b = 0; b < model.num_types(); ++b) {
    if (pi_hat[b] == 0.0) continue;  // 0 * S = 0 at the simplex boundary
    value += pi_hat[b] * relative_entropy(profile.row(b), model.alpha(b));
  }
  return value;
}

Profile mean_field_map(const ModelSpec& model, const ProbabilityVector& nu) {
  std::vector<ProbabilityVector> rows;
  rows.reserve(model.num_types());
  for (Index b = 0; b < model.num_types(); ++b) rows.push_back(gamma_kernel(model, b, nu));
  return Profile(std::move(rows));
}

double total_mean_field_residual(const ModelSpec& model, const ProbabilityVector& nu) {
  ProbabilityVector mapped = mean_field_map(model, nu).total_measure(model.pi());
  return sup_distance(nu, mapped);
}

namespace {

Index reduced_dim(const ModelSpec& model) {
  return (model.num_spins() - 1) * model.num_types();
}

Eigen::VectorXd to_reduced(const Profile& p) {
  const Index q = p.num_spins(), L = p.num_types();
  Eigen::VectorXd x((q - 1) * L);
  for (Index b = 0; b < L; ++b)
    for (Index i = 0; i + 1 < q; ++i) x(b * (q - 1) + i) = p.row(b)[i];
  return x;
}

// Builds a profile from drop-last coordinates; returns false when any entry
// leaves the open simplex.
bool from_reduced(const Eigen::VectorXd& x, Index num_types, Index num_spins, Profile& out) {
  const Index q = num_spins, L = num_types;
  std::vector<ProbabilityVector> rows;
  rows.reserve(L);
  for (Index b = 0; b < L; ++b) {
    std::vector<double> row(q);
    double sum = 0.0;
    for (Index i = 0; i + 1 < q; ++i) {
      double v = x(b * (q - 1) + i);
      if (!(v > 0.0)) return false;
      row[i] = v;
      sum += v;
    }
    if (!(sum < 1.0)) return false;
    row[q - 1] = 1.0 - sum;
    rows.push_back(ProbabilityVector(std::move(row)));
  }
  out = Profile(std::move(rows));
  return true;
}

}  // namespace

Eigen::VectorXd phi_gradient_reduced(const ModelSpec& model, const ProbabilityVector& pi_hat,
                                     const Profile& profile) {
  if (!profile.strictly_interior())
    throw ValidationError("phi gradient needs a strictly interior profile");
  const Index q = model.num_spins(), L = model.num_types();
  std::vector<double> grad_f =
      model.interaction().gradient(profile.total_measure(pi_hat).entries());
  Eigen::VectorXd g(reduced_dim(model));
  for (Index b = 0; b < L; ++b) {
    const ProbabilityVector& row = profile.row(b);
    const ProbabilityVector& a = model.alpha(b);
    double last = std::log(row[q - 1] / a[q - 1]);
    for (Index i = 0; i + 1 < q; ++i) {
      g(b * (q - 1) + i) =
          pi_hat[b] * (grad_f[i] - grad_f[q - 1] + std::log(row[i] / a[i]) - last);
    }
  }
  return g;
}

Eigen::MatrixXd phi_hessian(const ModelSpec& model, const ProbabilityVector& pi_hat,
                            const Profile& profile) {
  if (!profile.strictly_interior())
    throw ValidationError("phi Hessian needs a strictly interior profile");
  if (!pi_hat.strictly_positive())
    throw ValidationError("phi Hessian needs strictly positive pi_hat");
  const Index q = model.num_spins(), L = model.num_types();
  const Index n = reduced_dim(model);
  Eigen::MatrixXd hf = model.interaction().hessian(profile.total_measure(pi_hat).entries());
  // Hessian of F in drop-last coordinates of the total measure.
  Eigen::MatrixXd hf_red(q - 1, q - 1);
  for (Index i = 0; i + 1 < q; ++i)
    for (Index j = 0; j + 1 < q; ++j)
      hf_red(i, j) = hf(i, j) - hf(i, q - 1) - hf(q - 1, j) + hf(q - 1, q - 1);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Index b = 0; b < L; ++b)
    for (Index c = 0; c < L; ++c)
      h.block(b * (q - 1), c * (q - 1), q - 1, q - 1) = pi_hat[b] * pi_hat[c] * hf_red;
  for (Index b = 0; b < L; ++b) {
    const ProbabilityVector& row = profile.row(b);
    for (Index i = 0; i + 1 < q; ++i) {
      for (Index j = 0; j + 1 < q; ++j) {
        double entropy = 1.0 / row[q - 1] + (i == j ? 1.0 / row[i] : 0.0);
        h(b * (q - 1) + i, b * (q - 1) + j) += pi_hat[b] * entropy;
      }
    }
  }
  return h;
}

std::vector<Minimizer> SolveResult::global_minimizers() const {
  std::vector<Minimizer> out;
  for (const auto& m : minimizers)
    if (m.global) out.push_back(m);
  return out;
}

namespace {

struct Candidate {
  Profile profile;
  ProbabilityVector total;
  double phi_value = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
};

std::vector<Profile> build_starts(const ModelSpec& model, const SolverOptions& opts) {
  const Index q = model.num_spins(), L = model.num_types();
  std::vector<Profile> starts;
  starts.push_back(Profile(model.alpha()));
  for (Index a = 0; a < q; ++a)
    for (double w : {0.9, 0.5})
      starts.push_back(Profile::constant(ProbabilityVector::spike(q, a, w), L));
  for (int r = 0; r < opts.random_starts; ++r) {
    auto rng = make_engine(opts.seed, static_cast<std::uint64_t>(r));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<ProbabilityVector> rows;
    rows.reserve(L);
    for (Index b = 0; b < L; ++b) {
      // Dirichlet(1,...,1) via normalized exponentials.
      std::vector<double> e(q);
      double sum = 0.0;
      for (Index a = 0; a < q; ++a) {
        e[a] = -std::log1p(-unif(rng));
        sum += e[a];
      }
      for (double& x : e) x /= sum;
      rows.push_back(ProbabilityVector(std::move(e)));
    }
    starts.push_back(Profile(std::move(rows)));
  }
  return starts;
}

double fixed_point_residual(const ModelSpec& model, const Profile& p, Profile& mapped) {
  mapped = mean_field_map(model, p.total_measure(model.pi()));
  return sup_distance(p, mapped);
}

Candidate solve_from(const ModelSpec& model, const SolverOptions& opts, Profile p) {
  const Index q = model.num_spins(), L = model.num_types();
  const double lambda = opts.damping;
  Profile mapped;
  double res = fixed_point_residual(model, p, mapped);
  const double fp_stop = std::min(1e-9, opts.residual_tolerance);
  for (int iter = 0; iter < opts.max_fixed_point_iters && res > fp_stop; ++iter) {
    std::vector<ProbabilityVector> rows;
    rows.reserve(L);
    for (Index b = 0; b < L; ++b) {
      std::vector<double> row(q);
      for (Index a = 0; a < q; ++a)
        row[a] = (1.0 - lambda) * p.row(b)[a] + lambda * mapped.row(b)[a];
      rows.push_back(ProbabilityVector(std::move(row)));
    }
    p = Profile(std::move(rows));
    res = fixed_point_residual(model, p, mapped);
  }

  // Newton polish on the reduced stationarity condition.
  Eigen::VectorXd x = to_reduced(p);
  for (int iter = 0; iter < opts.max_newton_iters && res > 1e-14; ++iter) {
    Eigen::VectorXd g = phi_gradient_reduced(model, model.pi(), p);
    Eigen::MatrixXd h = phi_hessian(model, model.pi(), p);
    Eigen::VectorXd step = h.fullPivLu().solve(-g);
    if (!step.allFinite()) break;
    bool improved = false;
    double scale = 1.0;
    for (int halvings = 0; halvings < 40; ++halvings, scale *= 0.5) {
      Profile trial;
      if (!from_reduced(x + scale * step, L, q, trial)) continue;
      Profile trial_mapped;
      double trial_res = fixed_point_residual(model, trial, trial_mapped);
      if (trial_res < res) {
        p = trial;
        x = to_reduced(p);
        res = trial_res;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }

  Candidate c;
  c.profile = p;
  c.total = p.total_measure(model.pi());
  c.phi_value = phi(model, model.pi(), p);
  c.residual = res;
  c.converged = res <= opts.residual_tolerance;
  return c;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool candidate_order(const Candidate& a, const Candidate& b) {
  if (a.phi_value != b.phi_value) return a.phi_value < b.phi_value;
  if (a.total.raw() != b.total.raw()) return lex_less(a.total.entries(), b.total.entries());
  for (Index i = 0; i < a.profile.num_types(); ++i)
    if (a.profile.row(i).raw() != b.profile.row(i).raw())
      return lex_less(a.profile.row(i).entries(), b.profile.row(i).entries());
  return false;
}

}  // namespace

SolveResult find_minimizers(const ModelSpec& model, const SolverOptions& opts) {
  std::vector<Profile> starts = build_starts(model, opts);
  std::vector<Candidate> results(starts.size());
  parallel_for(starts.size(), opts.workers,
               [&](std::size_t i) { results[i] = solve_from(model, opts, starts[i]); });

  SolveResult out;
  out.starts = static_cast<int>(starts.size());
  std::vector<Candidate> converged;
  for (auto& c : results) {
    if (c.converged)
      converged.push_back(std::move(c));
    else
      ++out.failed_starts;
  }
  if (converged.empty())
    throw SolverDidNotConverge("no start reached the residual tolerance " +
                               std::to_string(opts.residual_tolerance));

  std::sort(converged.begin(), converged.end(), candidate_order);
  std::vector<Candidate> distinct;
  for (auto& c : converged) {
    bool dup = false;
    for (const auto& kept : distinct) {
      if (sup_distance(c.profile, kept.profile) <= opts.dedup_tolerance) {
        dup = true;
        break;
      }
    }
    if (!dup) distinct.push_back(std::move(c));
  }

  const double phi_min = distinct.front().phi_value;
  for (const auto& c : distinct) {
    Eigen::MatrixXd h = phi_hessian(model, model.pi(), c.profile);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
    double min_eig = eig.eigenvalues().minCoeff();
    bool tied_with_minimum = c.phi_value <= phi_min + opts.global_gap_tolerance;
    if (min_eig <= opts.eigenvalue_threshold) {
      if (tied_with_minimum)
        throw NonDegeneracy1Violation(
            "global minimizer has a reduced-Hessian eigenvalue below threshold",
            c.phi_value, min_eig);
      ++out.saddles_discarded;  // stationary but not a local minimum
      continue;
    }
    Minimizer m;
    m.profile = c.profile;
    m.total_measure = c.total;
    m.phi_value = c.phi_value;
    m.hessian_min_eigenvalue = min_eig;
    m.fixed_point_residual = c.residual;
    m.global = tied_with_minimum;
    out.minimizers.push_back(std::move(m));
  }
  return out;
}

ProbabilityVector potts_symmetric_measure(int q, Index j, double u) {
  if (q < 2) throw ValidationError("Potts needs q >= 2");
  if (j >= static_cast<Index>(q)) throw ValidationError("spin index out of range");
  if (!(u >= 0.0 && u < 1.0 + 1e-15)) throw ValidationError("u must lie in [0, 1)");
  double qd = static_cast<double>(q);
  std::vector<double> e(static_cast<Index>(q), (1.0 - u) / qd);
  e[j] = (1.0 + u * (qd - 1.0)) / qd;
  return ProbabilityVector(std::move(e));
}

double phi_reduced_potts(int q, double beta, double field_strength, double u) {
  if (q < 2) throw ValidationError("Potts needs q >= 2");
  const double qd = static_cast<double>(q);
  const double eb = std::exp(field_strength);
  const double a = eb + (qd - 1.0);
  const double d1 = std::exp(field_strength + beta * u) + (qd - 1.0);
  // e^{beta u} + e^B + q - 2 arranged so that u = 0 gives d2 == a exactly.
  const double d2 = std::expm1(beta * u) + a;
  return std::log(a / d2) + beta * (qd - 1.0) * u * u / (2.0 * qd) + beta * u / qd -
         std::log(d1 / d2) / qd;
}

namespace {

// Residual of the scalar consistency equation for the order parameter u.
double potts_u_residual(int q, double beta, double field_strength, double u) {
  const double qd = static_cast<double>(q);
  const double x = std::exp(beta * u);
  const double d1 = std::exp(field_strength + beta * u) + (qd - 1.0);
  const double d2 = x + std::exp(field_strength) + (qd - 2.0);
  return u - x / d2 + 1.0 / d1;
}

double potts_u_residual_derivative(int q, double beta, double field_strength, double u) {
  const double qd = static_cast<double>(q);
  const double x = std::exp(beta * u);
  const double eb = std::exp(field_strength);
  const double d1 = eb * x + (qd - 1.0);
  const double d2 = x + eb + (qd - 2.0);
  return 1.0 - beta * x * (eb + qd - 2.0) / (d2 * d2) - beta * eb * x / (d1 * d1);
}

}  // namespace

PottsReducedMinimum potts_reduced_minimum(int q, double beta, double field_strength,
                                          double u_max) {
  const double u_min = 1e-6;
  const int grid = 1024;
  double best_u = u_min;
  double best_v = phi_reduced_potts(q, beta, field_strength, u_min);
  for (int i = 1; i <= grid; ++i) {
    double u = u_min + (u_max - u_min) * static_cast<double>(i) / grid;
    double v = phi_reduced_potts(q, beta, field_strength, u);
    if (v < best_v) {
      best_v = v;
      best_u = u;
    }
  }
  // Golden-section refine inside the bracketing grid cell.
  const double step = (u_max - u_min) / grid;
  double lo = std::max(u_min, best_u - step), hi = std::min(u_max, best_u + step);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
  double fc = phi_reduced_potts(q, beta, field_strength, c);
  double fd = phi_reduced_potts(q, beta, field_strength, d);
  for (int it = 0; it < 120 && hi - lo > 1e-13; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = phi_reduced_potts(q, beta, field_strength, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = phi_reduced_potts(q, beta, field_strength, d);
    }
  }
  double u = 0.5 * (lo + hi);
  double v = phi_reduced_potts(q, beta, field_strength, u);
  if (v < best_v) {
    best_v = v;
    best_u = u;
  }
  // Newton polish on the stationarity condition; rejected if it leaves the
  // basin or runs into the trivial root u = 0.
  double un = best_u;
  for (int it = 0; it < 12; ++it) {
    double f = potts_u_residual(q, beta, field_strength, un);
    double fp = potts_u_residual_derivative(q, beta, field_strength, un);
    if (fp == 0.0) break;
    un -= f / fp;
    if (!(un > u_min && un <= u_max)) break;
  }
  if (un > u_min && un <= u_max) {
    double vn = phi_reduced_potts(q, beta, field_strength, un);
    if (vn <= best_v) {
      best_v = vn;
      best_u = un;
    }
  }
  return {best_u, best_v};
}

}  // namespace metastate
