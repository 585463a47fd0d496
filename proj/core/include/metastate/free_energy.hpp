#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "metastate/model.hpp"
#include "metastate/simplex.hpp"

namespace metastate {

/// A vector of per-disorder-type spin distributions, the optimization
/// variable of the free energy functional.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<ProbabilityVector> rows);

  Index num_types() const { return rows_.size(); }
  Index num_spins() const { return rows_.empty() ? 0 : rows_[0].dim(); }
  const ProbabilityVector& row(Index b) const { return rows_[b]; }
  const std::vector<ProbabilityVector>& rows() const { return rows_; }

  /// sum_b pi(b) row(b).
  ProbabilityVector total_measure(const ProbabilityVector& pi) const;
  bool strictly_interior() const;

  static Profile constant(const ProbabilityVector& row, Index num_types);

 private:
  std::vector<ProbabilityVector> rows_;
};

double sup_distance(const Profile& a, const Profile& b);

/// Free energy Phi[pi_hat](profile) = F(pi_hat . profile)
///                                  + sum_b pi_hat(b) S(profile(b)|alpha[b]).
double phi(const ModelSpec& model, const ProbabilityVector& pi_hat, const Profile& profile);

/// Gamma_hat(nu): the profile whose b-th row is gamma[b](.|nu).
Profile mean_field_map(const ModelSpec& model, const ProbabilityVector& nu);

/// Sup-norm of nu - sum_b pi(b) gamma[b](.|nu).
double total_mean_field_residual(const ModelSpec& model, const ProbabilityVector& nu);

/// Gradient of Phi in drop-last coordinates per block; length (|E|-1)|E'|.
Eigen::VectorXd phi_gradient_reduced(const ModelSpec& model, const ProbabilityVector& pi_hat,
                                     const Profile& profile);

/// Hessian of Phi in drop-last coordinates per block; pi_hat must be strictly
/// positive and the profile strictly interior.
Eigen::MatrixXd phi_hessian(const ModelSpec& model, const ProbabilityVector& pi_hat,
                            const Profile& profile);

struct SolverOptions {
  int random_starts = 64;
  double damping = 0.5;
  int max_fixed_point_iters = 10000;
  int max_newton_iters = 50;
  double residual_tolerance = 1e-10;
  double dedup_tolerance = 1e-6;
  double global_gap_tolerance = 1e-8;
  double eigenvalue_threshold = 1e-8;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
};

struct Minimizer {
  Profile profile;
  ProbabilityVector total_measure;
  double phi_value = 0.0;
  double hessian_min_eigenvalue = 0.0;
  double fixed_point_residual = 0.0;
  bool global = false;  // member of M*
};

struct SolveResult {
  std::vector<Minimizer> minimizers;  // sorted by phi, then total measure
  int starts = 0;
  int failed_starts = 0;
  int saddles_discarded = 0;

  std::vector<Minimizer> global_minimizers() const;
};

/// Multi-start damped fixed-point iteration of the consistency equation with
/// Newton polish. Returns all distinct local minimizers found; entries within
/// global_gap_tolerance of the best value are flagged as members of M*.
///
/// Throws NonDegeneracy1Violation if a stationary point tied with the minimum
/// has a reduced-Hessian eigenvalue below eigenvalue_threshold, and
/// SolverDidNotConverge if every start exhausts its budget.
SolveResult find_minimizers(const ModelSpec& model, const SolverOptions& opts = {});

/// nu_{j,u}: mass (1 + u(q-1))/q on spin j and (1-u)/q elsewhere.
ProbabilityVector potts_symmetric_measure(int q, Index j, double u);

/// The u-dependent part of Phi[pi](Gamma_hat(nu_{j,u})) for the homogeneous
/// random-field Potts model; zero at u = 0 by construction.
double phi_reduced_potts(int q, double beta, double field_strength, double u);

struct PottsReducedMinimum {
  double u = 0.0;
  double value = 0.0;
};

/// Minimum of phi_reduced_potts over u in (0, u_max]: coarse grid, golden
/// section, then Newton polish on the stationarity condition.
PottsReducedMinimum potts_reduced_minimum(int q, double beta, double field_strength,
                                          double u_max = 0.95);

}  // namespace metastate
