#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "metastate/errors.hpp"
#include "metastate/stability.hpp"
#include "oracles.hpp"

using namespace metastate;

TEST_CASE("stability vector of the non-interacting model vanishes") {
  ModelSpec model(Alphabet({"a", "b"}), Alphabet({"x", "y", "z"}), make_zero_interaction(2),
                  {ProbabilityVector({0.3, 0.7}), ProbabilityVector({0.5, 0.5}),
                   ProbabilityVector({0.8, 0.2})},
                  ProbabilityVector({0.2, 0.3, 0.5}));
  SolveResult r = find_minimizers(model);
  REQUIRE(r.minimizers.size() == 1);
  CHECK(sup_norm(stability_vector_direct(model, r.minimizers[0])) <= 1e-12);
  std::mt19937_64 rng(43);
  for (int t = 0; t < 10; ++t)
    CHECK(sup_norm(stability_vector_partition(model, oracles::random_simplex_point(2, rng))) <=
          1e-14);
}

TEST_CASE("Ising stability vector matches the log-cosh closed form") {
  double beta = 2.0;
  std::vector<double> fields{0.5, 0.1, -0.4};
  ModelSpec model = build_ising_model(beta, fields, {0.3, 0.3, 0.4});
  for (double m : {-0.8, -0.2, 0.35, 0.9}) {
    ProbabilityVector nu({(1 + m) / 2, (1 - m) / 2});
    StabilityVector b = stability_vector_partition(model, nu);
    std::vector<double> expect;
    for (double h : fields)
      expect.push_back(std::log(std::cosh(beta * m + h) / std::cosh(h)));
    TangentVector closed = TangentVector::centered(std::move(expect));
    CHECK(sup_distance(b, closed) <= 1e-12);
  }
}

TEST_CASE("spin flip with field flip swaps the Ising stability coordinates") {
  ModelSpec model = build_ising_model(2.0, {0.25, -0.25});
  SolveResult r = find_minimizers(model);
  REQUIRE(r.minimizers.size() == 2);
  StabilityVector b_minus = stability_vector_direct(model, r.minimizers[0]);
  StabilityVector b_plus = stability_vector_direct(model, r.minimizers[1]);
  CHECK(b_plus[0] == doctest::Approx(b_minus[1]).epsilon(1e-10));
  CHECK(b_plus[1] == doctest::Approx(b_minus[0]).epsilon(1e-10));
}

TEST_CASE("both stability formulas agree at minimizers") {
  std::vector<ModelSpec> models;
  models.push_back(build_ising_model(2.0, {0.3, -0.3}));
  models.push_back(build_ising_model(1.6, {0.4, 0.1, -0.2}, {0.5, 0.2, 0.3}));
  models.push_back(build_potts_model(3, 2.9, 0.3));
  models.push_back(build_general_ising_model(
      [](double m) { return -1.1 * m * m / 2 - 0.2 * m * m * m * m / 4; },
      [](double m) { return -1.1 * m - 0.2 * m * m * m; }, {0.3, -0.1}));
  for (const auto& model : models) {
    SolveResult r = find_minimizers(model);
    REQUIRE(!r.minimizers.empty());
    for (const auto& m : r.minimizers) {
      StabilityVector direct = stability_vector_direct(model, m);
      StabilityVector partition = stability_vector_partition(model, m.total_measure);
      CHECK(sup_distance(direct, partition) <= 1e-10);
    }
  }
}

TEST_CASE("free energy identity through the little partition functions") {
  // Phi[pi](Gamma(nu)) = F(nu) - <dF_nu, nu> - <B_hat, pi> - C on pi.M*
  std::vector<ModelSpec> models;
  models.push_back(build_ising_model(2.0, {0.3, -0.3}));
  models.push_back(build_potts_model(3, 2.85, 0.3));
  models.push_back(build_ising_model(1.5, {0.2, -0.5}, {0.7, 0.3}));
  for (const auto& model : models) {
    SolveResult r = find_minimizers(model);
    for (const auto& m : r.minimizers) {
      const ProbabilityVector& nu = m.total_measure;
      double lhs = phi(model, model.pi(), mean_field_map(model, nu));
      std::vector<double> grad = model.interaction().gradient(nu.entries());
      double df_nu = 0.0;
      for (Index a = 0; a < nu.dim(); ++a) df_nu += grad[a] * nu[a];
      StabilityVector b_hat = stability_vector_partition(model, nu);
      double b_pi = 0.0;
      for (Index b = 0; b < model.num_types(); ++b) b_pi += b_hat[b] * model.pi()[b];
      double rhs = model.interaction().value(nu.entries()) - df_nu - b_pi -
                   stability_centering_constant(model, nu);
      CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
  }
}

TEST_CASE("Potts stability vector closed form and sign structure") {
  int q = 3;
  double beta = 2.9, field = 0.3;
  ModelSpec model = build_potts_model(q, beta, field);
  for (double u : {0.2, 0.5, 0.8}) {
    StabilityVector b = stability_vector_partition(model, potts_symmetric_measure(q, 0, u));
    double t = std::log((std::exp(beta * u + field) + q - 1.0) /
                        (std::exp(beta * u) + std::exp(field) + q - 2.0));
    CHECK(b[0] == doctest::Approx((q - 1.0) / q * t).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(-t / q).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(-t / q).epsilon(1e-12));
    CHECK(b[0] > 0.0);
    CHECK(b[1] < 0.0);
  }
}

TEST_CASE("non-degeneracy 2 checks") {
  SUBCASE("distinct vectors pass and report the closest pair") {
    std::vector<StabilityVector> vs{TangentVector({1.0, -1.0}), TangentVector({-1.0, 1.0}),
                                    TangentVector({0.5, -0.5})};
    auto diag = check_nondegeneracy2(vs, 1e-8);
    CHECK(diag.min_pairwise_distance == doctest::Approx(0.5));
  }
  SUBCASE("duplicated vectors violate") {
    std::vector<StabilityVector> vs{TangentVector({1.0, -1.0}), TangentVector({1.0, -1.0})};
    CHECK_THROWS_AS(check_nondegeneracy2(vs, 1e-8), NonDegeneracy2Violation);
  }
  SUBCASE("a single disorder type kills the tangent space") {
    ModelSpec model = build_ising_model(2.0, {0.0});  // |E'| = 1
    SolveResult r = find_minimizers(model);
    REQUIRE(r.minimizers.size() == 2);
    std::vector<StabilityVector> vs;
    for (const auto& m : r.minimizers) vs.push_back(stability_vector_direct(model, m));
    CHECK_THROWS_AS(check_nondegeneracy2(vs, 1e-8), NonDegeneracy2Violation);
  }
  SUBCASE("Ising with injective G' and two field values passes") {
    ModelSpec model = build_ising_model(2.0, {0.3, -0.3});
    SolveResult r = find_minimizers(model);
    std::vector<StabilityVector> vs;
    for (const auto& m : r.minimizers) vs.push_back(stability_vector_direct(model, m));
    auto diag = check_nondegeneracy2(vs, 1e-8);
    CHECK(diag.min_pairwise_distance > 0.1);
  }
}

TEST_CASE("visibility classification") {
  SUBCASE("a single state is trivially visible") {
    std::vector<StabilityVector> vs{TangentVector({0.0, 0.0})};
    VisibilityReport rep = visibility(vs);
    CHECK(rep.entries[0].visible);
    CHECK(!rep.entries[0].margin.has_value());
  }

  SUBCASE("two distinct points are both extreme") {
    std::vector<StabilityVector> vs{TangentVector({0.7, -0.7}), TangentVector({-0.2, 0.2})};
    VisibilityReport rep = visibility(vs);
    CHECK(rep.entries[0].visible);
    CHECK(rep.entries[1].visible);
    for (const auto& e : rep.entries) CHECK(*e.margin > 1e-9);
  }

  SUBCASE("a point inside a planar hull is invisible with a certificate") {
    // three extreme points and their barycenter, in T P(E') with |E'| = 3
    std::vector<StabilityVector> vs{
        TangentVector({2.0, -1.0, -1.0}), TangentVector({-1.0, 2.0, -1.0}),
        TangentVector({-1.0, -1.0, 2.0}), TangentVector({0.0, 0.0, 0.0})};
    VisibilityReport rep = visibility(vs);
    CHECK(rep.entries[0].visible);
    CHECK(rep.entries[1].visible);
    CHECK(rep.entries[2].visible);
    CHECK(!rep.entries[3].visible);
    const auto& cert = rep.entries[3];
    REQUIRE(cert.combination.size() == 4);
    CHECK(cert.combination[3] == 0.0);
    double sum = 0.0;
    for (double l : cert.combination) {
      CHECK(l >= -1e-12);
      sum += l;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cert.combination_error <= 1e-9);
  }

  SUBCASE("witness certificates re-verify") {
    std::mt19937_64 rng(47);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<StabilityVector> vs;
      for (int j = 0; j < 5; ++j) {
        std::vector<double> e(4);
        for (double& x : e) x = normal(rng);
        vs.push_back(TangentVector::centered(std::move(e)));
      }
      VisibilityReport rep = visibility(vs);
      int visible_count = 0;
      for (Index j = 0; j < vs.size(); ++j) {
        const auto& cert = rep.entries[j];
        if (cert.visible) {
          ++visible_count;
          REQUIRE(cert.margin.has_value());
          double margin = std::numeric_limits<double>::infinity();
          for (Index i = 0; i < vs.size(); ++i) {
            if (i == j) continue;
            double gap = 0.0;
            for (Index b = 0; b < 4; ++b) gap += cert.witness[b] * (vs[j][b] - vs[i][b]);
            margin = std::min(margin, gap);
          }
          CHECK(margin >= *cert.margin - 1e-12);
          CHECK(margin > rep.lp_tolerance);
        } else {
          CHECK(cert.combination_error <= 1e-8);
        }
      }
      // at least two extreme points exist whenever the vectors are distinct
      CHECK(visible_count >= 2);
    }
  }

  SUBCASE("Potts coexistence: the symmetric state is inside the ordered hull") {
    double beta = 4 * std::log(2.0) + 0.03203;
    ModelSpec model = build_potts_model(3, beta, 0.3);
    SolveResult r = find_minimizers(model);
    REQUIRE(r.minimizers.size() == 4);
    std::vector<StabilityVector> vs;
    Index symmetric_index = 0;
    for (Index j = 0; j < r.minimizers.size(); ++j) {
      vs.push_back(stability_vector_direct(model, r.minimizers[j]));
      double top = *std::max_element(r.minimizers[j].total_measure.entries().begin(),
                                     r.minimizers[j].total_measure.entries().end());
      if (top < 0.4) symmetric_index = j;
    }
    CHECK(sup_norm(vs[symmetric_index]) <= 1e-9);  // B of the u = 0 state is zero
    VisibilityReport rep = visibility(vs);
    for (Index j = 0; j < vs.size(); ++j)
      CHECK(rep.entries[j].visible == (j != symmetric_index));
  }
}
