#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "metastate/simplex.hpp"
#include "metastate/stability.hpp"

namespace metastate {

/// Stream of i.i.d. centered Gaussian tangent vectors with covariance
/// C(b,b') = pi(b) 1{b=b'} - pi(b) pi(b'), the CLT limit of the disorder
/// fluctuations. Realized as sqrt(pi) * Y - pi * <sqrt(pi), Y>, so every
/// sample sums to zero up to rounding.
class GaussianTangentSampler {
 public:
  GaussianTangentSampler(ProbabilityVector pi, std::uint64_t seed);

  TangentVector next();

 private:
  ProbabilityVector pi_;
  std::vector<double> sqrt_pi_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

struct WeightVector {
  std::vector<double> weights;        // count_j / accepted
  std::vector<double> standard_errors;
  std::vector<std::uint64_t> counts;  // partition of the accepted samples
  std::uint64_t samples = 0;
  std::uint64_t accepted = 0;
  std::uint64_t ties_discarded = 0;
};

/// Monte Carlo estimate of w_j = P(G lands in the stability region of j):
/// classify each Gaussian sample by argmax_j <x, B_j>; samples within
/// tie_margin of a tie are discarded and counted. Refuses (ValidationError)
/// when the tie fraction exceeds 1e-3, which signals near-degenerate inputs.
WeightVector weights_mc(std::span<const StabilityVector> vectors, const ProbabilityVector& pi,
                        std::uint64_t samples, std::uint64_t seed, int workers = 0,
                        double tie_margin = 1e-14);

/// Closed form for |E'| = 2: the tangent space is one-dimensional, so only
/// the states with extreme first component get weight, 1/2 each.
std::vector<double> weights_two_type_closed_form(std::span<const StabilityVector> vectors);

}  // namespace metastate
