#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately brute force and stays independent of the library code paths it
// checks.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "metastate/free_energy.hpp"
#include "metastate/model.hpp"
#include "metastate/simulator.hpp"

namespace oracles {

using metastate::Index;

/// Central finite differences of a scalar function on R^d.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    double keep = x[i];
    x[i] = keep + h;
    double up = f(x);
    x[i] = keep - h;
    double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Bisection for a sign change of f on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    if ((flo <= 0.0) == (fmid <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Positive root of m = sum_i pi_i tanh(beta m + h_i) (the Ising mean-field
/// equation), found by bisection on [lo, hi].
inline double ising_magnetization(double beta, const std::vector<double>& fields,
                                  const std::vector<double>& pi, double lo, double hi) {
  auto f = [&](double m) {
    double s = 0.0;
    for (Index i = 0; i < fields.size(); ++i) s += pi[i] * std::tanh(beta * m + fields[i]);
    return m - s;
  };
  return bisect(f, lo, hi);
}

/// Key for a count profile: flattened (type, spin) counts.
using CountKey = std::vector<int>;

/// Exact law of the per-type spin counts by direct summation over all |E|^n
/// spin configurations. Usable up to n ~ 14.
inline std::map<CountKey, double> brute_force_count_distribution(
    const metastate::ModelSpec& model, const metastate::DisorderSample& eta) {
  const Index q = model.num_spins();
  const Index L = model.num_types();
  const Index n = eta.n();
  std::map<CountKey, double> weights;
  std::vector<Index> spin(n, 0);
  double total = 0.0;
  for (;;) {
    CountKey key(L * q, 0);
    double log_alpha = 0.0;
    std::vector<double> measure(q, 0.0);
    for (Index i = 0; i < n; ++i) {
      key[eta.eta[i] * q + spin[i]] += 1;
      log_alpha += std::log(model.alpha(eta.eta[i])[spin[i]]);
      measure[spin[i]] += 1.0 / static_cast<double>(n);
    }
    double w = std::exp(-static_cast<double>(n) *
                            model.interaction().value(std::span<const double>(measure)) +
                        log_alpha);
    weights[key] += w;
    total += w;
    // odometer over spin configurations
    Index pos = 0;
    while (pos < n && ++spin[pos] == q) spin[pos++] = 0;
    if (pos == n) break;
  }
  for (auto& [k, w] : weights) w /= total;
  return weights;
}

/// Exact k-marginal by direct summation over all |E|^n configurations.
inline std::vector<double> brute_force_k_marginal(const metastate::ModelSpec& model,
                                                  const metastate::DisorderSample& eta,
                                                  Index k) {
  const Index q = model.num_spins();
  const Index n = eta.n();
  Index n_configs = 1;
  for (Index i = 0; i < k; ++i) n_configs *= q;
  std::vector<double> marg(n_configs, 0.0);
  std::vector<Index> spin(n, 0);
  double total = 0.0;
  for (;;) {
    double log_alpha = 0.0;
    std::vector<double> measure(q, 0.0);
    for (Index i = 0; i < n; ++i) {
      log_alpha += std::log(model.alpha(eta.eta[i])[spin[i]]);
      measure[spin[i]] += 1.0 / static_cast<double>(n);
    }
    double w = std::exp(-static_cast<double>(n) *
                            model.interaction().value(std::span<const double>(measure)) +
                        log_alpha);
    Index idx = 0;
    for (Index i = 0; i < k; ++i) idx = idx * q + spin[i];
    marg[idx] += w;
    total += w;
    Index pos = 0;
    while (pos < n && ++spin[pos] == q) spin[pos++] = 0;
    if (pos == n) break;
  }
  for (double& w : marg) w /= total;
  return marg;
}

/// Random interior profile, kept away from the boundary.
inline metastate::Profile random_interior_profile(Index num_types, Index num_spins,
                                                  std::mt19937_64& rng,
                                                  double boundary_mix = 0.2) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<metastate::ProbabilityVector> rows;
  for (Index b = 0; b < num_types; ++b) {
    std::vector<double> e(num_spins);
    double sum = 0.0;
    for (Index a = 0; a < num_spins; ++a) {
      e[a] = -std::log1p(-unif(rng));
      sum += e[a];
    }
    for (double& x : e)
      x = (1.0 - boundary_mix) * (x / sum) + boundary_mix / static_cast<double>(num_spins);
    rows.push_back(metastate::ProbabilityVector(std::move(e)));
  }
  return metastate::Profile(std::move(rows));
}

inline metastate::ProbabilityVector random_simplex_point(Index dim, std::mt19937_64& rng,
                                                         double boundary_mix = 0.2) {
  return random_interior_profile(1, dim, rng, boundary_mix).row(0);
}

}  // namespace oracles
