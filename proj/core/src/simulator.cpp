#include "metastate/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "metastate/errors.hpp"
#include "metastate/parallel.hpp"
#include "metastate/rng.hpp"

namespace metastate {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class LogSumExp {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const { return sum_ > 0.0 ? max_ + std::log(sum_) : kNegInf; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// All spin-count vectors of one disorder type, with their log weights
// log Mult(m; k) + sum_a k_a log alpha(a), in lexicographic order.
struct BlockTable {
  std::vector<std::vector<int>> counts;
  std::vector<double> log_weight;
};

BlockTable build_block(Index m, const ProbabilityVector& alpha,
                       const std::vector<double>& lgamma_table) {
  const Index q = alpha.dim();
  std::vector<double> log_alpha(q);
  for (Index a = 0; a < q; ++a) log_alpha[a] = std::log(alpha[a]);

  BlockTable table;
  // Odometer over compositions of m into q parts, lexicographic.
  std::vector<int> head(q, 0);
  std::function<void(Index, int)> rec = [&](Index pos, int remaining) {
    if (pos + 1 == q) {
      head[pos] = remaining;
      double lw = lgamma_table[m];
      for (Index a = 0; a < q; ++a)
        lw += -lgamma_table[head[a]] + head[a] * log_alpha[a];
      table.counts.push_back(head);
      table.log_weight.push_back(lw);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      head[pos] = c;
      rec(pos + 1, remaining - c);
    }
  };
  rec(0, static_cast<int>(m));
  return table;
}

// Streams every count profile with its unnormalized log weight
// log w = -n F(t/n) + sum_b [log Mult + alpha powers].
// cb(flat_counts, total_counts, log_weight); flat is type-major.
template <typename Cb>
void for_each_profile(const ModelSpec& model, const DisorderSample& eta, Cb&& cb) {
  const Index q = model.num_spins();
  const Index L = model.num_types();
  const Index n = eta.n();
  const double nd = static_cast<double>(n);

  Index max_m = 0;
  for (Index b = 0; b < L; ++b) max_m = std::max(max_m, eta.type_counts[b]);
  std::vector<double> lg(max_m + 1);
  for (Index i = 0; i <= max_m; ++i) lg[i] = std::lgamma(static_cast<double>(i) + 1.0);

  std::vector<BlockTable> blocks;
  blocks.reserve(L);
  for (Index b = 0; b < L; ++b) blocks.push_back(build_block(eta.type_counts[b], model.alpha(b), lg));

  std::vector<int> flat(L * q, 0);
  std::vector<int> totals(q, 0);
  std::vector<double> measure(q, 0.0);
  const auto& f_value = model.interaction().value;

  std::function<void(Index, double)> rec = [&](Index b, double partial_lw) {
    const BlockTable& table = blocks[b];
    if (b + 1 == L) {
      for (Index idx = 0; idx < table.counts.size(); ++idx) {
        const std::vector<int>& k = table.counts[idx];
        for (Index a = 0; a < q; ++a) {
          flat[b * q + a] = k[a];
          measure[a] = static_cast<double>(totals[a] + k[a]) / nd;
        }
        double lw = partial_lw + table.log_weight[idx] -
                    nd * f_value(std::span<const double>(measure));
        for (Index a = 0; a < q; ++a) totals[a] += k[a];
        cb(std::span<const int>(flat), std::span<const int>(totals), lw);
        for (Index a = 0; a < q; ++a) totals[a] -= k[a];
      }
      return;
    }
    for (Index idx = 0; idx < table.counts.size(); ++idx) {
      const std::vector<int>& k = table.counts[idx];
      for (Index a = 0; a < q; ++a) {
        flat[b * q + a] = k[a];
        totals[a] += k[a];
      }
      rec(b + 1, partial_lw + table.log_weight[idx]);
      for (Index a = 0; a < q; ++a) totals[a] -= k[a];
    }
  };
  rec(0, 0.0);
}

void check_budget(const ModelSpec& model, const DisorderSample& eta, std::uint64_t budget) {
  std::uint64_t size = enumeration_size(model.num_spins(), eta.type_counts);
  if (size > budget)
    throw BudgetExceeded("exact enumeration needs " + std::to_string(size) +
                             " count profiles, budget is " + std::to_string(budget),
                         size, budget);
}

void validate_disorder(const ModelSpec& model, const DisorderSample& eta) {
  if (eta.num_types != model.num_types())
    throw ValidationError("disorder sample does not match the model's type count");
  if (eta.n() == 0) throw ValidationError("disorder sample is empty");
}

}  // namespace

ProbabilityVector DisorderSample::empirical_law() const {
  std::vector<double> p(num_types);
  for (Index b = 0; b < num_types; ++b)
    p[b] = static_cast<double>(type_counts[b]) / static_cast<double>(n());
  return ProbabilityVector(std::move(p));
}

DisorderSample sample_disorder(const ProbabilityVector& pi, Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("need n >= 1 sites");
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DisorderSample out;
  out.num_types = pi.dim();
  out.eta.resize(n);
  out.type_counts.assign(pi.dim(), 0);
  for (Index i = 0; i < n; ++i) {
    double u = unif(engine);
    double acc = 0.0;
    Index b = pi.dim() - 1;
    for (Index c = 0; c < pi.dim(); ++c) {
      acc += pi[c];
      if (u < acc) {
        b = c;
        break;
      }
    }
    out.eta[i] = b;
    ++out.type_counts[b];
  }
  return out;
}

DisorderSample disorder_from_sequence(std::vector<Index> eta, Index num_types) {
  if (eta.empty()) throw ValidationError("need n >= 1 sites");
  DisorderSample out;
  out.num_types = num_types;
  out.type_counts.assign(num_types, 0);
  for (Index b : eta) {
    if (b >= num_types) throw ValidationError("type index out of range");
    ++out.type_counts[b];
  }
  out.eta = std::move(eta);
  return out;
}

std::uint64_t enumeration_size(Index num_spins, std::span<const Index> type_counts) {
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 total = 1;
  for (Index m : type_counts) {
    // C(m + q - 1, q - 1) by the exact binomial recurrence.
    unsigned __int128 c = 1;
    for (Index i = 1; i < num_spins; ++i) {
      c = c * (static_cast<unsigned __int128>(m) + i) / i;
      if (c > static_cast<unsigned __int128>(1) << 100) return cap;
    }
    total *= c;
    if (total > static_cast<unsigned __int128>(1e18)) return cap;
  }
  return static_cast<std::uint64_t>(total);
}

CountProfile ExactEmpiricalDistribution::profile(Index i) const {
  CountProfile p;
  p.counts.assign(num_types_, std::vector<int>(num_spins_, 0));
  for (Index b = 0; b < num_types_; ++b)
    for (Index a = 0; a < num_spins_; ++a)
      p.counts[b][a] = static_cast<int>(flat_counts_[(i * num_types_ + b) * num_spins_ + a]);
  return p;
}

std::vector<int> ExactEmpiricalDistribution::total_counts(Index i) const {
  std::vector<int> t(num_spins_, 0);
  for (Index b = 0; b < num_types_; ++b)
    for (Index a = 0; a < num_spins_; ++a)
      t[a] += static_cast<int>(flat_counts_[(i * num_types_ + b) * num_spins_ + a]);
  return t;
}

ProbabilityVector ExactEmpiricalDistribution::total_measure(Index i) const {
  std::vector<int> t = total_counts(i);
  std::vector<double> m(num_spins_);
  for (Index a = 0; a < num_spins_; ++a)
    m[a] = static_cast<double>(t[a]) / static_cast<double>(n_);
  return ProbabilityVector(std::move(m));
}

ExactEmpiricalDistribution exact_empirical_distribution(const ModelSpec& model,
                                                        const DisorderSample& eta,
                                                        std::uint64_t budget) {
  validate_disorder(model, eta);
  check_budget(model, eta, budget);

  ExactEmpiricalDistribution out;
  out.n_ = eta.n();
  out.num_types_ = model.num_types();
  out.num_spins_ = model.num_spins();
  out.type_counts_ = eta.type_counts;

  std::vector<double> log_weights;
  for_each_profile(model, eta,
                   [&](std::span<const int> flat, std::span<const int>, double lw) {
                     for (int c : flat) out.flat_counts_.push_back(static_cast<std::uint32_t>(c));
                     log_weights.push_back(lw);
                   });
  LogSumExp lse;
  for (double lw : log_weights) lse.add(lw);
  const double log_z = lse.value();
  out.probabilities_.resize(log_weights.size());
  for (Index i = 0; i < log_weights.size(); ++i)
    out.probabilities_[i] = std::exp(log_weights[i] - log_z);
  return out;
}

KMarginal::KMarginal(Index k, Index num_spins, std::vector<double> probabilities)
    : k_(k), num_spins_(num_spins), probabilities_(std::move(probabilities)) {
  Index expected = 1;
  for (Index i = 0; i < k_; ++i) expected *= num_spins_;
  if (probabilities_.size() != expected)
    throw ValidationError("k-marginal has the wrong number of atoms");
}

double KMarginal::probability(std::span<const Index> config) const {
  if (config.size() != k_) throw ValidationError("config length mismatch");
  Index idx = 0;
  for (Index i = 0; i < k_; ++i) {
    if (config[i] >= num_spins_) throw ValidationError("spin index out of range");
    idx = idx * num_spins_ + config[i];
  }
  return probabilities_[idx];
}

KMarginal KMarginal::restrict(Index k2) const {
  if (k2 > k_) throw ValidationError("cannot restrict to more coordinates");
  Index tail = 1;
  for (Index i = k2; i < k_; ++i) tail *= num_spins_;
  Index head = probabilities_.size() / tail;
  std::vector<double> p(head, 0.0);
  for (Index i = 0; i < head; ++i)
    for (Index j = 0; j < tail; ++j) p[i] += probabilities_[i * tail + j];
  return KMarginal(k2, num_spins_, std::move(p));
}

KMarginal exact_k_marginal(const ModelSpec& model, const DisorderSample& eta, Index k,
                           std::uint64_t budget) {
  validate_disorder(model, eta);
  if (k < 1 || k > eta.n()) throw ValidationError("k must lie in [1, n]");
  const Index q = model.num_spins();
  const Index n = eta.n();
  const double nd = static_cast<double>(n);

  // Split sites into the fixed prefix [0,k) and the enumerated tail [k,n).
  std::vector<Index> tail_eta(eta.eta.begin() + static_cast<long>(k), eta.eta.end());
  DisorderSample tail;
  Index n_configs = 1;
  for (Index i = 0; i < k; ++i) {
    if (n_configs > budget / q)
      throw BudgetExceeded("prefix enumeration exceeds the budget", 0, budget);
    n_configs *= q;
  }
  std::uint64_t tail_size = 1;
  if (!tail_eta.empty()) {
    tail = disorder_from_sequence(tail_eta, model.num_types());
    tail_size = enumeration_size(q, tail.type_counts);
    if (tail_size == std::numeric_limits<std::uint64_t>::max() ||
        tail_size > budget / n_configs)
      throw BudgetExceeded("exact k-marginal needs " + std::to_string(tail_size) + " x " +
                               std::to_string(n_configs) + " terms, budget is " +
                               std::to_string(budget),
                           tail_size, budget);
  }

  // Per prefix configuration: spin counts and the log a-priori factor.
  std::vector<std::vector<int>> prefix_counts(n_configs, std::vector<int>(q, 0));
  std::vector<double> prefix_log_alpha(n_configs, 0.0);
  std::vector<Index> config(k, 0);
  for (Index c = 0; c < n_configs; ++c) {
    Index rem = c;
    for (Index i = k; i-- > 0;) {
      config[i] = rem % q;
      rem /= q;
    }
    for (Index i = 0; i < k; ++i) {
      prefix_counts[c][config[i]] += 1;
      prefix_log_alpha[c] += std::log(model.alpha(eta.eta[i])[config[i]]);
    }
  }

  std::vector<LogSumExp> acc(n_configs);
  std::vector<double> measure(q);
  const auto& f_value = model.interaction().value;
  auto accumulate_tail = [&](std::span<const int> totals, double tail_lw) {
    for (Index c = 0; c < n_configs; ++c) {
      for (Index a = 0; a < q; ++a)
        measure[a] = static_cast<double>(totals[a] + prefix_counts[c][a]) / nd;
      acc[c].add(tail_lw + prefix_log_alpha[c] -
                 nd * f_value(std::span<const double>(measure)));
    }
  };

  if (tail_eta.empty()) {
    std::vector<int> zero(q, 0);
    accumulate_tail(std::span<const int>(zero), 0.0);
  } else {
    // The tail weight must not include the F factor, so enumerate with F = 0
    // and add the full-volume F term per prefix configuration above.
    ModelSpec free_model(model.spin_alphabet(), model.disorder_alphabet(),
                         make_zero_interaction(q), model.alpha(), model.pi());
    for_each_profile(free_model, tail,
                     [&](std::span<const int>, std::span<const int> totals, double lw) {
                       accumulate_tail(totals, lw);
                     });
  }

  LogSumExp total;
  for (const auto& a : acc) total.add(a.value());
  const double log_z = total.value();
  std::vector<double> probs(n_configs);
  for (Index c = 0; c < n_configs; ++c) probs[c] = std::exp(acc[c].value() - log_z);
  return KMarginal(k, q, std::move(probs));
}

KMarginal product_kernel_marginal(const ModelSpec& model, const DisorderSample& eta, Index k,
                                  const ProbabilityVector& nu) {
  if (k < 1 || k > eta.n()) throw ValidationError("k must lie in [1, n]");
  const Index q = model.num_spins();
  std::vector<ProbabilityVector> kernels;
  kernels.reserve(k);
  for (Index i = 0; i < k; ++i) kernels.push_back(gamma_kernel(model, eta.eta[i], nu));
  Index n_configs = 1;
  for (Index i = 0; i < k; ++i) n_configs *= q;
  std::vector<double> probs(n_configs, 1.0);
  for (Index c = 0; c < n_configs; ++c) {
    Index rem = c;
    for (Index i = k; i-- > 0;) {
      probs[c] *= kernels[i][rem % q];
      rem /= q;
    }
  }
  return KMarginal(k, q, std::move(probs));
}

double tv_distance(const KMarginal& p, const KMarginal& q) {
  if (p.k() != q.k() || p.num_spins() != q.num_spins())
    throw ValidationError("marginals live on different spaces");
  double s = 0.0;
  for (Index i = 0; i < p.probabilities().size(); ++i)
    s += std::abs(p.probabilities()[i] - q.probabilities()[i]);
  return 0.5 * s;
}

double marginal_distance(const KMarginal& p, const KMarginal& q, Index k) {
  if (k < 1 || k > p.k() || k > q.k())
    throw ValidationError("k out of range for marginal distance");
  double d = 0.0;
  double w = 1.0;
  for (Index i = 1; i <= k; ++i) {
    w *= 0.5;
    d += w * tv_distance(p.restrict(i), q.restrict(i));
  }
  return d;
}

namespace {

void validate_ball_centers(std::span<const ProbabilityVector> centers, double epsilon) {
  if (centers.empty()) throw ValidationError("need at least one ball center");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  for (Index i = 0; i < centers.size(); ++i)
    for (Index j = i + 1; j < centers.size(); ++j) {
      double d = tv_distance(centers[i], centers[j]);
      if (!(epsilon < 0.5 * d))
        throw ValidationError("epsilon-balls around the centers overlap");
    }
}

int ball_index(std::span<const int> totals, double n,
               std::span<const ProbabilityVector> centers, double epsilon) {
  for (Index j = 0; j < centers.size(); ++j) {
    double dist = 0.0;
    for (Index a = 0; a < centers[j].dim(); ++a)
      dist += std::abs(static_cast<double>(totals[a]) / n - centers[j][a]);
    if (0.5 * dist <= epsilon) return static_cast<int>(j);
  }
  return -1;
}

}  // namespace

BallMasses ball_mass(const ExactEmpiricalDistribution& distribution,
                     std::span<const ProbabilityVector> centers, double epsilon) {
  validate_ball_centers(centers, epsilon);
  BallMasses out;
  out.epsilon = epsilon;
  out.masses.assign(centers.size(), 0.0);
  const double nd = static_cast<double>(distribution.n());
  for (Index i = 0; i < distribution.size(); ++i) {
    std::vector<int> totals = distribution.total_counts(i);
    int j = ball_index(totals, nd, centers, epsilon);
    if (j >= 0)
      out.masses[static_cast<Index>(j)] += distribution.probability(i);
    else
      out.remainder += distribution.probability(i);
  }
  return out;
}

EmpiricalWeightEstimate empirical_weights(const ModelSpec& model,
                                          std::span<const Minimizer> minimizers, Index n,
                                          Index n_samples, double epsilon,
                                          double dominance_threshold, std::uint64_t seed,
                                          std::uint64_t budget, int workers) {
  if (minimizers.empty()) throw ValidationError("need at least one minimizer");
  if (n_samples < 1) throw ValidationError("need at least one disorder draw");
  if (!(dominance_threshold > 0.0 && dominance_threshold < 1.0))
    throw ValidationError("dominance threshold must lie in (0,1)");

  std::vector<ProbabilityVector> centers;
  centers.reserve(minimizers.size());
  for (const auto& m : minimizers) centers.push_back(m.total_measure);

  if (epsilon <= 0.0) {
    if (centers.size() >= 2) {
      double min_d = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < centers.size(); ++i)
        for (Index j = i + 1; j < centers.size(); ++j)
          min_d = std::min(min_d, tv_distance(centers[i], centers[j]));
      epsilon = min_d / 3.0;
    } else {
      epsilon = 0.1;
    }
  }
  validate_ball_centers(centers, epsilon);

  EmpiricalWeightEstimate est;
  est.n = n;
  est.n_samples = n_samples;
  est.epsilon = epsilon;
  est.dominance_threshold = dominance_threshold;
  est.draws.resize(n_samples);

  const double eps = epsilon;
  parallel_for(n_samples, workers, [&](std::size_t i) {
    std::uint64_t draw_seed = derive_seed(seed, i);
    DisorderSample eta = sample_disorder(model.pi(), n, draw_seed);
    check_budget(model, eta, budget);
    const double nd = static_cast<double>(n);
    std::vector<LogSumExp> per_ball(centers.size());
    LogSumExp outside, total;
    for_each_profile(model, eta,
                     [&](std::span<const int>, std::span<const int> totals, double lw) {
                       int j = ball_index(totals, nd, centers, eps);
                       if (j >= 0)
                         per_ball[static_cast<Index>(j)].add(lw);
                       else
                         outside.add(lw);
                       total.add(lw);
                     });
    DrawRecord rec;
    rec.seed = draw_seed;
    rec.pi_hat = eta.empirical_law().raw();
    const double log_z = total.value();
    rec.ball_masses.resize(centers.size());
    for (Index j = 0; j < centers.size(); ++j) {
      double v = per_ball[j].value();
      rec.ball_masses[j] = v == kNegInf ? 0.0 : std::exp(v - log_z);
    }
    double rem = outside.value();
    rec.remainder = rem == kNegInf ? 0.0 : std::exp(rem - log_z);
    // Attribution follows the ball-normalized measure rho^eps: the share of
    // the in-ball mass held by the largest ball must clear the threshold.
    rec.attributed = -1;
    double in_balls = 0.0;
    for (double m : rec.ball_masses) in_balls += m;
    if (in_balls > 0.0) {
      Index best = 0;
      for (Index j = 1; j < centers.size(); ++j)
        if (rec.ball_masses[j] > rec.ball_masses[best]) best = j;
      if (rec.ball_masses[best] / in_balls > dominance_threshold)
        rec.attributed = static_cast<int>(best);
    }
    est.draws[i] = std::move(rec);
  });

  std::vector<Index> counts(centers.size(), 0);
  Index unresolved = 0;
  for (const auto& rec : est.draws) {
    if (rec.attributed >= 0)
      ++counts[static_cast<Index>(rec.attributed)];
    else
      ++unresolved;
  }
  est.frequencies.resize(centers.size());
  est.standard_errors.resize(centers.size());
  const double ns = static_cast<double>(n_samples);
  for (Index j = 0; j < centers.size(); ++j) {
    double f = static_cast<double>(counts[j]) / ns;
    est.frequencies[j] = f;
    est.standard_errors[j] = std::sqrt(f * (1.0 - f) / ns);
  }
  est.unresolved_fraction = static_cast<double>(unresolved) / ns;
  return est;
}

}  // namespace metastate
