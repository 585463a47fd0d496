#pragma once

#include <optional>
#include <span>
#include <vector>

#include "metastate/free_energy.hpp"
#include "metastate/model.hpp"
#include "metastate/simplex.hpp"

namespace metastate {

/// A stability vector lives in the tangent space of P(E').
using StabilityVector = TangentVector;

/// B_j from the linearization of Phi in the disorder law: per type b,
/// -(<dF at the total measure, row b> + S(row b | alpha[b])), centered.
StabilityVector stability_vector_direct(const ModelSpec& model, const Minimizer& minimizer);

/// B-hat from the log normalizers of the mean-field kernels at nu:
/// log sum_a exp(-dF_nu(a)) alpha[b](a), centered over b. Agrees with the
/// direct formula at every minimizer.
StabilityVector stability_vector_partition(const ModelSpec& model, const ProbabilityVector& nu);

/// The centering constant of the partition route: the mean over b of the log
/// normalizers. With it, Phi[pi](Gamma_hat(nu)) = F(nu) - <dF_nu, nu>
/// - <B_hat, pi> - C at every nu in pi.M*.
double stability_centering_constant(const ModelSpec& model, const ProbabilityVector& nu);

struct NonDegeneracy2Diagnostics {
  double min_pairwise_distance = 0.0;
  Index closest_first = 0;
  Index closest_second = 0;
};

/// Passes iff all pairwise sup-distances exceed pair_tolerance; throws
/// NonDegeneracy2Violation otherwise. A single vector passes trivially.
NonDegeneracy2Diagnostics check_nondegeneracy2(std::span<const StabilityVector> vectors,
                                               double pair_tolerance = 1e-8);

struct VisibilityCertificate {
  bool visible = false;
  /// Separating direction with ||x||_inf <= 1 (visible case).
  TangentVector witness;
  /// min_{i != j} <witness, B_j - B_i>; empty when there is no competitor.
  std::optional<double> margin;
  /// Convex weights over the other vectors reproducing B_j (invisible case),
  /// indexed like the input with entry j fixed to zero.
  std::vector<double> combination;
  double combination_error = 0.0;
};

struct VisibilityReport {
  std::vector<VisibilityCertificate> entries;
  double lp_tolerance = 0.0;
  double min_pairwise_distance = 0.0;
};

/// Classifies each stability vector as an extreme point of the convex hull
/// (visible, nonempty stability region) or not, with re-verifiable
/// certificates. Requires non-degeneracy 2 to have passed.
VisibilityReport visibility(std::span<const StabilityVector> vectors,
                            double lp_tolerance = 1e-9);

}  // namespace metastate
