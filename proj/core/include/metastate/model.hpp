#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "metastate/simplex.hpp"

namespace metastate {

/// Mean-field interaction F on P(E) with differential and Hessian.
///
/// The gradient is reported as a full-length vector on E; it is meaningful
/// only up to additive constants (dF acts on the tangent space), and every
/// consumer is shift-invariant.
struct InteractionFunctional {
  Index dimension = 0;
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  std::function<Eigen::MatrixXd(std::span<const double>)> hessian;
};

/// F(nu) = -beta * sum_a nu(a)^2 on the two-point alphabet.
InteractionFunctional make_quadratic_ising(double beta);

/// F(nu) = -(beta/2) * sum_a nu(a)^2 on q symbols.
InteractionFunctional make_quadratic_potts(int q, double beta);

/// F(nu) = G(nu(+) - nu(-)). When no second derivative is supplied the Hessian
/// falls back to central differences of g_prime.
InteractionFunctional make_general_ising(
    std::function<double(double)> g, std::function<double(double)> g_prime,
    std::function<double(double)> g_second = nullptr);

/// The non-interacting functional F = 0.
InteractionFunctional make_zero_interaction(Index dimension);

/// Single-site measures alpha[h](s) = exp(h s) / (2 cosh h), s = +/-1, one per
/// field value. Row order matches the field list; spin order is (+, -).
std::vector<ProbabilityVector> make_ising_field_kernels(const std::vector<double>& fields);

/// Potts random field of homogeneous intensity: alpha[b](a) proportional to
/// exp(B 1{a=b}); one kernel per b in {1..q}.
std::vector<ProbabilityVector> make_potts_field_kernels(int q, double field_strength);

/// A single Potts kernel boosting one target spin by exp(B).
ProbabilityVector potts_boost_kernel(int q, Index target_spin, double field_strength);

/// The model triple (F, alpha, pi). Immutable after construction; operations
/// on it are pure functions.
class ModelSpec {
 public:
  ModelSpec(Alphabet spin_alphabet, Alphabet disorder_alphabet, InteractionFunctional f,
            std::vector<ProbabilityVector> alpha, ProbabilityVector pi);

  const Alphabet& spin_alphabet() const { return spins_; }
  const Alphabet& disorder_alphabet() const { return disorder_; }
  Index num_spins() const { return spins_.size(); }
  Index num_types() const { return disorder_.size(); }
  const InteractionFunctional& interaction() const { return f_; }
  const ProbabilityVector& alpha(Index b) const { return alpha_[b]; }
  const std::vector<ProbabilityVector>& alpha() const { return alpha_; }
  const ProbabilityVector& pi() const { return pi_; }

 private:
  Alphabet spins_;
  Alphabet disorder_;
  InteractionFunctional f_;
  std::vector<ProbabilityVector> alpha_;
  ProbabilityVector pi_;
};

/// gamma[b](a | nu) = exp(-dF_nu(a)) alpha[b](a) / normalizer. Invariant under
/// shifting dF_nu by a constant.
ProbabilityVector gamma_kernel(const ModelSpec& model, Index b, const ProbabilityVector& nu);

/// Relative entropy S(p|q) = sum_a p(a) log(p(a)/q(a)) with 0 log 0 = 0.
/// q must be strictly positive.
double relative_entropy(const ProbabilityVector& p, const ProbabilityVector& q);

/// Random-field Ising model with quadratic interaction: spins (+,-), one
/// disorder type per field value. Empty pi_weights means uniform.
ModelSpec build_ising_model(double beta, const std::vector<double>& fields,
                            std::vector<double> pi_weights = {});

/// Ising model with Hamiltonian F(nu) = G(nu(+) - nu(-)).
ModelSpec build_general_ising_model(std::function<double(double)> g,
                                    std::function<double(double)> g_prime,
                                    const std::vector<double>& fields,
                                    std::vector<double> pi_weights = {},
                                    std::function<double(double)> g_second = nullptr);

/// q-state Potts model with homogeneous random field: E' = E, uniform pi.
ModelSpec build_potts_model(int q, double beta, double field_strength);

}  // namespace metastate
