#include "metastate/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metastate/errors.hpp"
#include "metastate/parallel.hpp"
#include "metastate/rng.hpp"

namespace metastate {

GaussianTangentSampler::GaussianTangentSampler(ProbabilityVector pi, std::uint64_t seed)
    : pi_(std::move(pi)), engine_(seed) {
  if (!pi_.strictly_positive())
    throw ValidationError("Gaussian sampler needs strictly positive pi");
  sqrt_pi_.resize(pi_.dim());
  for (Index b = 0; b < pi_.dim(); ++b) sqrt_pi_[b] = std::sqrt(pi_[b]);
}

TangentVector GaussianTangentSampler::next() {
  const Index d = pi_.dim();
  std::vector<double> y(d);
  double proj = 0.0;
  for (Index b = 0; b < d; ++b) {
    y[b] = normal_(engine_);
    proj += sqrt_pi_[b] * y[b];
  }
  std::vector<double> g(d);
  for (Index b = 0; b < d; ++b) g[b] = sqrt_pi_[b] * y[b] - pi_[b] * proj;
  // The construction sums to zero up to rounding; recenter the leftover ulps
  // so downstream code may rely on the tangent-space invariant.
  return TangentVector::centered(std::move(g));
}

namespace {

constexpr std::uint64_t kBlockSize = 1 << 16;

struct BlockCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t ties = 0;
};

}  // namespace

WeightVector weights_mc(std::span<const StabilityVector> vectors, const ProbabilityVector& pi,
                        std::uint64_t samples, std::uint64_t seed, int workers,
                        double tie_margin) {
  if (vectors.empty()) throw ValidationError("need at least one stability vector");
  const Index k = vectors.size();
  const Index d = pi.dim();
  for (const auto& v : vectors)
    if (v.dim() != d) throw ValidationError("stability vector dimension mismatch");
  if (samples < 10000) throw ValidationError("weights_mc needs at least 10^4 samples");

  const std::uint64_t nblocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<BlockCounts> blocks(nblocks);

  parallel_for(nblocks, workers, [&](std::size_t blk) {
    std::uint64_t begin = blk * kBlockSize;
    std::uint64_t count = std::min<std::uint64_t>(kBlockSize, samples - begin);
    GaussianTangentSampler sampler(pi, derive_seed(seed, blk));
    BlockCounts& out = blocks[blk];
    out.counts.assign(k, 0);
    for (std::uint64_t s = 0; s < count; ++s) {
      TangentVector g = sampler.next();
      double best = -std::numeric_limits<double>::infinity();
      double second = best;
      Index argmax = 0;
      for (Index j = 0; j < k; ++j) {
        double v = 0.0;
        for (Index b = 0; b < d; ++b) v += g[b] * vectors[j][b];
        if (v > best) {
          second = best;
          best = v;
          argmax = j;
        } else if (v > second) {
          second = v;
        }
      }
      if (k > 1 && best - second < tie_margin)
        ++out.ties;  // boundary between regions: zero Lebesgue measure
      else
        ++out.counts[argmax];
    }
  });

  WeightVector result;
  result.samples = samples;
  result.counts.assign(k, 0);
  for (const auto& blk : blocks) {
    result.ties_discarded += blk.ties;
    for (Index j = 0; j < k; ++j) result.counts[j] += blk.counts[j];
  }
  result.accepted = samples - result.ties_discarded;
  if (result.ties_discarded > samples / 1000)
    throw ValidationError(
        "more than 0.1% of Gaussian samples were ties; stability vectors are "
        "nearly degenerate");
  result.weights.resize(k);
  result.standard_errors.resize(k);
  for (Index j = 0; j < k; ++j) {
    double w = static_cast<double>(result.counts[j]) / static_cast<double>(result.accepted);
    result.weights[j] = w;
    result.standard_errors[j] =
        std::sqrt(w * (1.0 - w) / static_cast<double>(result.accepted));
  }
  return result;
}

std::vector<double> weights_two_type_closed_form(std::span<const StabilityVector> vectors) {
  if (vectors.empty()) throw ValidationError("need at least one stability vector");
  if (vectors[0].dim() != 2)
    throw ValidationError("closed form applies to |E'| = 2 only");
  if (vectors.size() == 1) return {1.0};
  // <G, B_j> = 2 g B_j[0] with g symmetric, so the extremes of the first
  // component split the mass evenly.
  Index lo = 0, hi = 0;
  for (Index j = 1; j < vectors.size(); ++j) {
    if (vectors[j][0] > vectors[hi][0]) hi = j;
    if (vectors[j][0] < vectors[lo][0]) lo = j;
  }
  std::vector<double> w(vectors.size(), 0.0);
  w[hi] += 0.5;
  w[lo] += 0.5;
  return w;
}

}  // namespace metastate
