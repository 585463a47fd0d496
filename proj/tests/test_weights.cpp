#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "metastate/errors.hpp"
#include "metastate/report.hpp"
#include "metastate/weights.hpp"
#include "oracles.hpp"

using namespace metastate;

TEST_CASE("Gaussian tangent sampler has the CLT covariance") {
  ProbabilityVector pi({0.2, 0.3, 0.5});
  GaussianTangentSampler sampler(pi, 99);
  const int n = 1000000;
  std::vector<double> mean(3, 0.0), var(3, 0.0);
  double max_sum = 0.0;
  for (int t = 0; t < n; ++t) {
    TangentVector g = sampler.next();
    double s = 0.0;
    for (Index b = 0; b < 3; ++b) {
      mean[b] += g[b];
      var[b] += g[b] * g[b];
      s += g[b];
    }
    max_sum = std::max(max_sum, std::abs(s));
  }
  CHECK(max_sum <= 1e-12);  // sums to zero by construction
  for (Index b = 0; b < 3; ++b) {
    mean[b] /= n;
    var[b] = var[b] / n - mean[b] * mean[b];
    double sigma2 = pi[b] * (1 - pi[b]);
    double se_mean = std::sqrt(sigma2 / n);
    double se_var = sigma2 * std::sqrt(2.0 / n);
    CHECK(std::abs(mean[b]) <= 5 * se_mean);
    CHECK(std::abs(var[b] - sigma2) <= 5 * se_var);
  }
}

TEST_CASE("two symmetric types give a one-dimensional Gaussian of variance 1/4") {
  GaussianTangentSampler sampler(ProbabilityVector({0.5, 0.5}), 7);
  const int n = 200000;
  double var = 0.0;
  for (int t = 0; t < n; ++t) {
    TangentVector g = sampler.next();
    CHECK(std::abs(g[0] + g[1]) <= 1e-13);
    var += g[0] * g[0];
  }
  var /= n;
  CHECK(std::abs(var - 0.25) <= 5 * 0.25 * std::sqrt(2.0 / n));
}

TEST_CASE("two states split the weight evenly") {
  std::vector<StabilityVector> vs{TangentVector::centered({0.9, 0.1, -0.3}),
                                  TangentVector::centered({-0.2, 0.4, 0.6})};
  ProbabilityVector pi({0.25, 0.35, 0.4});
  WeightVector w = weights_mc(vs, pi, 1000000, 5);
  CHECK(w.counts[0] + w.counts[1] == w.accepted);
  for (int j = 0; j < 2; ++j)
    CHECK(std::abs(w.weights[j] - 0.5) <= 3 * w.standard_errors[j]);
}

TEST_CASE("two disorder types allow exactly two visible states") {
  // four states over |E'| = 2; only the extremes of the first component
  // matter and each gets 1/2
  std::vector<StabilityVector> vs{TangentVector({0.3, -0.3}), TangentVector({-0.7, 0.7}),
                                  TangentVector({0.9, -0.9}), TangentVector({0.0, 0.0})};
  ProbabilityVector pi({0.6, 0.4});
  WeightVector w = weights_mc(vs, pi, 400000, 11);
  std::vector<double> closed = weights_two_type_closed_form(vs);
  CHECK(closed == std::vector<double>{0.0, 0.5, 0.5, 0.0});
  CHECK(w.counts[0] == 0);
  CHECK(w.counts[3] == 0);
  for (Index j = 0; j < 4; ++j)
    CHECK(std::abs(w.weights[j] - closed[j]) <= 3 * w.standard_errors[j] + 1e-12);
}

TEST_CASE("classification is invariant under common translations and scalings") {
  std::vector<StabilityVector> vs{TangentVector::centered({0.8, -0.1, -0.4}),
                                  TangentVector::centered({-0.5, 0.6, 0.2}),
                                  TangentVector::centered({0.1, -0.6, 0.3})};
  TangentVector shift = TangentVector::centered({0.35, -0.1, -0.25});
  const double scale = 3.7;
  std::vector<StabilityVector> shifted, scaled;
  for (const auto& v : vs) {
    std::vector<double> s(3), c(3);
    for (Index b = 0; b < 3; ++b) {
      s[b] = v[b] + shift[b];
      c[b] = scale * v[b];
    }
    shifted.push_back(TangentVector::centered(std::move(s)));
    scaled.push_back(TangentVector(std::move(c)));
  }
  ProbabilityVector pi({0.3, 0.3, 0.4});
  GaussianTangentSampler sampler(pi, 123);
  for (int t = 0; t < 10000; ++t) {
    TangentVector g = sampler.next();
    auto argmax = [&](const std::vector<StabilityVector>& set) {
      Index best = 0;
      double best_v = -1e300;
      for (Index j = 0; j < set.size(); ++j) {
        double v = dot(g, set[j]);
        if (v > best_v) {
          best_v = v;
          best = j;
        }
      }
      return best;
    };
    Index base = argmax(vs);
    CHECK(argmax(shifted) == base);
    CHECK(argmax(scaled) == base);
  }
}

TEST_CASE("weights are invariant under symmetries of pi that permute the vectors") {
  // uniform pi; swapping the first two coordinates maps the set to itself
  std::vector<StabilityVector> vs{TangentVector({0.5, -0.25, -0.25}),
                                  TangentVector({-0.25, 0.5, -0.25}),
                                  TangentVector({-0.25, -0.25, 0.5})};
  ProbabilityVector pi = ProbabilityVector::uniform(3);
  WeightVector w = weights_mc(vs, pi, 1000000, 31);
  // the permutation swaps states 0 and 1 and fixes state 2
  CHECK(std::abs(w.weights[0] - w.weights[1]) <=
        3 * (w.standard_errors[0] + w.standard_errors[1]));
  for (Index j = 0; j < 3; ++j)
    CHECK(std::abs(w.weights[j] - 1.0 / 3) <= 3 * w.standard_errors[j]);
}

TEST_CASE("degenerate stability vectors are refused through the tie guard") {
  std::vector<StabilityVector> vs{TangentVector({0.4, -0.4}), TangentVector({0.4, -0.4})};
  CHECK_THROWS_AS(weights_mc(vs, ProbabilityVector({0.5, 0.5}), 20000, 3), ValidationError);
}

TEST_CASE("weights_mc input validation") {
  std::vector<StabilityVector> vs{TangentVector({0.4, -0.4})};
  CHECK_THROWS_AS(weights_mc(vs, ProbabilityVector({0.5, 0.5}), 100, 3), ValidationError);
}

TEST_CASE("worker count does not change the counts") {
  std::vector<StabilityVector> vs{TangentVector::centered({0.8, -0.1, -0.4}),
                                  TangentVector::centered({-0.5, 0.6, 0.2})};
  ProbabilityVector pi({0.3, 0.3, 0.4});
  WeightVector a = weights_mc(vs, pi, 300000, 17, 1);
  WeightVector b = weights_mc(vs, pi, 300000, 17, 4);
  CHECK(a.counts == b.counts);
  CHECK(a.ties_discarded == b.ties_discarded);
}

TEST_CASE("metastate report on the symmetric two-phase Ising model") {
  ModelSpec model = build_ising_model(2.0, {0.3, -0.3});
  SolveResult r = find_minimizers(model);
  MetastateOptions opts;
  opts.mc_samples = 200000;
  MetastateReport report = build_metastate_report(model, r.minimizers, opts);
  REQUIRE(report.entries.size() == 2);
  CHECK(report.stability_route_max_diff <= 1e-10);
  for (const auto& e : report.entries) {
    CHECK(e.certificate.visible);
    CHECK(std::abs(e.weight - 0.5) <= 3 * e.standard_error);
    REQUIRE(!e.kernels.empty());
    // kernels of the report match the mean-field kernels at the state
    for (Index b = 0; b < model.num_types(); ++b)
      CHECK(sup_distance(e.kernels[b],
                         gamma_kernel(model, b, e.minimizer.total_measure)) == 0.0);
  }
  // simultaneous spin flip and field swap exchanges the two kernel families
  const auto& lo = report.entries[0];
  const auto& hi = report.entries[1];
  for (Index b = 0; b < 2; ++b)
    for (Index a = 0; a < 2; ++a)
      CHECK(lo.kernels[b][a] == doctest::Approx(hi.kernels[1 - b][1 - a]).epsilon(1e-9));
  std::string json_text = report_to_json_string(model, report);
  CHECK(json_text.find("\"schema_version\": \"1\"") != std::string::npos);
  std::string text = report_to_text(model, report);
  CHECK(text.find("weight") != std::string::npos);
}
