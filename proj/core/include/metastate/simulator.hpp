#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metastate/free_energy.hpp"
#include "metastate/model.hpp"
#include "metastate/simplex.hpp"

namespace metastate {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10000000;

/// A quenched disorder realization: one type per site plus its type counts.
struct DisorderSample {
  std::vector<Index> eta;          // type index per site
  std::vector<Index> type_counts;  // |Lambda_n(b)|, sums to n
  Index num_types = 0;

  Index n() const { return eta.size(); }
  /// pi_hat_n; may have zero entries.
  ProbabilityVector empirical_law() const;
};

DisorderSample sample_disorder(const ProbabilityVector& pi, Index n, std::uint64_t seed);
DisorderSample disorder_from_sequence(std::vector<Index> eta, Index num_types);

/// Per (type, spin) occupation numbers of one empirical microstate class.
struct CountProfile {
  std::vector<std::vector<int>> counts;  // [b][a]
};

/// Number of count profiles compatible with the type counts, saturating at
/// uint64 max.
std::uint64_t enumeration_size(Index num_spins, std::span<const Index> type_counts);

/// The exact law of the per-type empirical spin counts under the
/// finite-volume Gibbs measure, computed in the log domain from multinomial
/// weights. Profiles are stored in a fixed lexicographic order.
class ExactEmpiricalDistribution {
 public:
  Index size() const { return probabilities_.size(); }
  Index n() const { return n_; }
  Index num_types() const { return num_types_; }
  Index num_spins() const { return num_spins_; }
  const std::vector<Index>& type_counts() const { return type_counts_; }

  double probability(Index i) const { return probabilities_[i]; }
  CountProfile profile(Index i) const;
  /// Total spin counts of profile i (summed over types).
  std::vector<int> total_counts(Index i) const;
  /// The total empirical measure of profile i.
  ProbabilityVector total_measure(Index i) const;

 private:
  friend ExactEmpiricalDistribution exact_empirical_distribution(const ModelSpec&,
                                                                 const DisorderSample&,
                                                                 std::uint64_t);
  Index n_ = 0, num_types_ = 0, num_spins_ = 0;
  std::vector<Index> type_counts_;
  std::vector<std::uint32_t> flat_counts_;  // size() * num_types * num_spins
  std::vector<double> probabilities_;
};

/// Throws BudgetExceeded when the enumeration size exceeds the budget.
ExactEmpiricalDistribution exact_empirical_distribution(
    const ModelSpec& model, const DisorderSample& eta,
    std::uint64_t budget = kDefaultEnumerationBudget);

/// Exact joint law of the first k spins under the finite-volume Gibbs
/// measure, stored row-major over spin tuples.
class KMarginal {
 public:
  KMarginal() = default;
  KMarginal(Index k, Index num_spins, std::vector<double> probabilities);

  Index k() const { return k_; }
  Index num_spins() const { return num_spins_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  double probability(std::span<const Index> config) const;

  /// Marginal over the first k2 <= k coordinates.
  KMarginal restrict(Index k2) const;

 private:
  Index k_ = 0, num_spins_ = 0;
  std::vector<double> probabilities_;
};

KMarginal exact_k_marginal(const ModelSpec& model, const DisorderSample& eta, Index k,
                           std::uint64_t budget = kDefaultEnumerationBudget);

/// Product of the limiting kernels gamma[eta(i)](.|nu) over the first k sites.
KMarginal product_kernel_marginal(const ModelSpec& model, const DisorderSample& eta, Index k,
                                  const ProbabilityVector& nu);

/// Plain total variation between two laws on the same k sites.
double tv_distance(const KMarginal& p, const KMarginal& q);

/// sum_{i<=k} 2^{-i} TV(restriction to first i sites): the truncated metric
/// on laws of infinite spin sequences.
double marginal_distance(const KMarginal& p, const KMarginal& q, Index k);

struct BallMasses {
  std::vector<double> masses;  // per center
  double remainder = 0.0;
  double epsilon = 0.0;
};

/// Mass of the total-variation epsilon-balls around the given centers.
/// Requires epsilon < half the minimum pairwise distance of the centers.
BallMasses ball_mass(const ExactEmpiricalDistribution& distribution,
                     std::span<const ProbabilityVector> centers, double epsilon);

struct DrawRecord {
  std::uint64_t seed = 0;
  std::vector<double> pi_hat;
  std::vector<double> ball_masses;
  double remainder = 0.0;
  int attributed = -1;  // -1: unresolved
};

struct EmpiricalWeightEstimate {
  Index n = 0;
  Index n_samples = 0;
  double epsilon = 0.0;
  double dominance_threshold = 0.5;
  std::vector<double> frequencies;  // per minimizer, over disorder draws
  std::vector<double> standard_errors;
  double unresolved_fraction = 0.0;
  std::vector<DrawRecord> draws;
};

/// Finite-volume estimate of the metastate weights: for each disorder draw,
/// the exact ball masses around the limit centers pi.nu_j; the draw is
/// attributed to the largest ball when its share of the ball-normalized
/// measure rho^eps exceeds dominance_threshold, and is otherwise reported
/// unresolved. epsilon <= 0 picks one third of the minimum pairwise distance
/// between centers. Draws are enumerated exactly (no spin sampling).
EmpiricalWeightEstimate empirical_weights(const ModelSpec& model,
                                          std::span<const Minimizer> minimizers, Index n,
                                          Index n_samples, double epsilon,
                                          double dominance_threshold, std::uint64_t seed,
                                          std::uint64_t budget = kDefaultEnumerationBudget,
                                          int workers = 0);

}  // namespace metastate
