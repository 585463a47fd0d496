#include <doctest.h>

#include <cmath>
#include <random>

#include "metastate/errors.hpp"
#include "metastate/model.hpp"
#include "oracles.hpp"

using namespace metastate;

TEST_CASE("probability vectors enforce the simplex invariants") {
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(ProbabilityVector({1.2, -0.2}), ValidationError);
  CHECK_THROWS_AS(ProbabilityVector(std::vector<double>{}), ValidationError);
  ProbabilityVector p({0.25, 0.75});
  CHECK(p.dim() == 2);
  CHECK(p[1] == 0.75);
  CHECK(ProbabilityVector::uniform(4)[2] == doctest::Approx(0.25));
  CHECK(tv_distance(ProbabilityVector::delta(2, 0), ProbabilityVector::delta(2, 1)) ==
        doctest::Approx(1.0));
}

TEST_CASE("tangent vectors sum to zero") {
  CHECK_THROWS_AS(TangentVector({0.5, 0.6}), ValidationError);
  TangentVector t = TangentVector::centered({1.0, 2.0, 3.0});
  CHECK(t[0] == doctest::Approx(-1.0));
  CHECK(t[2] == doctest::Approx(1.0));
}

TEST_CASE("quadratic Ising values and gradient") {
  InteractionFunctional f = make_quadratic_ising(1.0);
  std::vector<double> sym{0.5, 0.5};
  CHECK(f.value(sym) == doctest::Approx(-0.5));  // -beta (1/4 + 1/4)
  std::vector<double> pure{1.0, 0.0};
  CHECK(f.value(pure) == doctest::Approx(-1.0));

  InteractionFunctional f2 = make_quadratic_ising(2.0);
  std::vector<double> nu{0.7, 0.3};
  std::vector<double> g = f2.gradient(nu);
  // frozen from the finite-difference oracle on the value
  auto val = [&](const std::vector<double>& x) { return f2.value(x); };
  std::vector<double> g_fd = oracles::fd_gradient(val, nu);
  CHECK(g[0] == doctest::Approx(-2.8).epsilon(1e-9));
  CHECK(g[1] == doctest::Approx(-1.2).epsilon(1e-9));
  CHECK(g[0] == doctest::Approx(g_fd[0]).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(g_fd[1]).epsilon(1e-6));

  CHECK_THROWS_AS(make_quadratic_ising(0.0), ValidationError);
  CHECK_THROWS_AS(make_quadratic_ising(-1.0), ValidationError);
}

TEST_CASE("quadratic Potts values and gradient") {
  InteractionFunctional f = make_quadratic_potts(3, 3.0);
  std::vector<double> unif{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(f.value(unif) == doctest::Approx(-0.5));  // -(3/2) * 3 * (1/9)

  // q = 2 Potts at 2 beta coincides with quadratic Ising at beta
  InteractionFunctional p2 = make_quadratic_potts(2, 2.0);
  InteractionFunctional i1 = make_quadratic_ising(1.0);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    ProbabilityVector nu = oracles::random_simplex_point(2, rng);
    CHECK(p2.value(nu.entries()) == doctest::Approx(i1.value(nu.entries())).epsilon(1e-14));
  }

  InteractionFunctional f1 = make_quadratic_potts(3, 1.0);
  std::vector<double> nu{0.5, 0.3, 0.2};
  std::vector<double> g = f1.gradient(nu);
  CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(-0.2).epsilon(1e-12));

  CHECK_THROWS_AS(make_quadratic_potts(1, 1.0), ValidationError);
  CHECK_THROWS_AS(make_quadratic_potts(3, 0.0), ValidationError);
}

TEST_CASE("built-in gradients match finite differences at random interior points") {
  std::mt19937_64 rng(11);
  auto check_fd = [&](const InteractionFunctional& f) {
    for (int t = 0; t < 100; ++t) {
      ProbabilityVector nu = oracles::random_simplex_point(f.dimension, rng);
      auto val = [&](const std::vector<double>& x) { return f.value(x); };
      std::vector<double> g_fd = oracles::fd_gradient(val, nu.raw());
      std::vector<double> g = f.gradient(nu.entries());
      for (Index a = 0; a < f.dimension; ++a) {
        double scale = std::max(1.0, std::abs(g[a]));
        CHECK(std::abs(g[a] - g_fd[a]) / scale <= 1e-6);
      }
    }
  };
  check_fd(make_quadratic_ising(1.7));
  check_fd(make_quadratic_potts(4, 2.3));
  check_fd(make_general_ising([](double m) { return -0.8 * m * m / 2 - 0.1 * m * m * m * m; },
                              [](double m) { return -0.8 * m - 0.4 * m * m * m; }));
}

TEST_CASE("Ising field kernels") {
  auto k0 = make_ising_field_kernels({0.0});
  CHECK(k0[0][0] == doctest::Approx(0.5));
  auto k = make_ising_field_kernels({0.5 * std::log(3.0)});
  CHECK(k[0][0] == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(k[0][1] == doctest::Approx(0.25).epsilon(1e-13));
  auto k1 = make_ising_field_kernels({1.0});
  // e / (e + 1/e), evaluated directly
  double expect = std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0));
  CHECK(k1[0][0] == doctest::Approx(expect).epsilon(1e-13));
  CHECK(k1[0][0] == doctest::Approx(0.880797).epsilon(1e-6));
  CHECK_THROWS_AS(make_ising_field_kernels({std::nan("")}), ValidationError);
}

TEST_CASE("Potts field kernels") {
  auto unif = make_potts_field_kernels(3, 0.0);
  for (Index b = 0; b < 3; ++b)
    for (Index a = 0; a < 3; ++a) CHECK(unif[b][a] == doctest::Approx(1.0 / 3));
  auto k = make_potts_field_kernels(3, std::log(2.0));
  CHECK(k[1][1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(k[1][0] == doctest::Approx(0.25).epsilon(1e-13));
  auto paper = make_potts_field_kernels(3, 0.3);
  CHECK(paper[2][2] == doctest::Approx(std::exp(0.3) / (std::exp(0.3) + 2)).epsilon(1e-13));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(build_ising_model(2.0, {0.3, -0.3}, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(build_ising_model(2.0, {0.3}, {1.0, 1.0}), ValidationError);
  // alpha with a zero entry is rejected
  CHECK_THROWS_AS(ModelSpec(Alphabet({"a", "b"}), Alphabet({"x"}), make_zero_interaction(2),
                            {ProbabilityVector({1.0, 0.0})}, ProbabilityVector({1.0})),
                  ValidationError);
}

TEST_CASE("gamma kernel") {
  SUBCASE("zero interaction returns the a-priori kernels") {
    ModelSpec model(Alphabet({"a", "b", "c"}), Alphabet({"x", "y"}), make_zero_interaction(3),
                    {ProbabilityVector({0.2, 0.3, 0.5}), ProbabilityVector({0.6, 0.3, 0.1})},
                    ProbabilityVector({0.5, 0.5}));
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
      ProbabilityVector nu = oracles::random_simplex_point(3, rng);
      for (Index b = 0; b < 2; ++b)
        CHECK(sup_distance(gamma_kernel(model, b, nu), model.alpha(b)) <= 1e-15);
    }
  }

  SUBCASE("Ising kernel mean is tanh(beta m + h)") {
    double beta = 1.4, h = 0.25;
    ModelSpec model = build_ising_model(beta, {h});
    for (double m : {-0.7, -0.1, 0.0, 0.4, 0.9}) {
      ProbabilityVector nu({(1 + m) / 2, (1 - m) / 2});
      ProbabilityVector g = gamma_kernel(model, 0, nu);
      CHECK(g[0] - g[1] == doctest::Approx(std::tanh(beta * m + h)).epsilon(1e-12));
    }
  }

  SUBCASE("Potts kernel at the uniform point reduces to the field odds") {
    ModelSpec model = build_potts_model(3, 2.0, 0.3);
    ProbabilityVector unif = ProbabilityVector::uniform(3);
    for (Index b = 0; b < 3; ++b) {
      ProbabilityVector g = gamma_kernel(model, b, unif);
      CHECK(g[b] == doctest::Approx(std::exp(0.3) / (std::exp(0.3) + 2)).epsilon(1e-12));
    }
  }

  SUBCASE("kernel sums to one and ignores constant gradient shifts") {
    ModelSpec base = build_potts_model(3, 2.0, 0.3);
    InteractionFunctional shifted = make_quadratic_potts(3, 2.0);
    auto grad = shifted.gradient;
    shifted.gradient = [grad](std::span<const double> nu) {
      std::vector<double> g = grad(nu);
      for (double& x : g) x += 17.5;
      return g;
    };
    ModelSpec other(base.spin_alphabet(), base.disorder_alphabet(), shifted, base.alpha(),
                    base.pi());
    std::mt19937_64 rng(5);
    for (int t = 0; t < 25; ++t) {
      ProbabilityVector nu = oracles::random_simplex_point(3, rng);
      for (Index b = 0; b < 3; ++b) {
        ProbabilityVector g1 = gamma_kernel(base, b, nu);
        ProbabilityVector g2 = gamma_kernel(other, b, nu);
        double sum = 0.0;
        for (Index a = 0; a < 3; ++a) sum += g1[a];
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(sup_distance(g1, g2) <= 1e-14);
      }
    }
  }
}

TEST_CASE("relative entropy") {
  ProbabilityVector p({0.75, 0.25});
  ProbabilityVector u2 = ProbabilityVector::uniform(2);
  CHECK(relative_entropy(p, p) == 0.0);
  CHECK(relative_entropy(ProbabilityVector({1.0, 0.0}), u2) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  double expect = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  CHECK(relative_entropy(p, u2) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(relative_entropy(u2, ProbabilityVector({1.0, 0.0})), ValidationError);

  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    ProbabilityVector a = oracles::random_simplex_point(4, rng);
    ProbabilityVector b = oracles::random_simplex_point(4, rng);
    double s = relative_entropy(a, b);
    CHECK(s >= 0.0);
    if (sup_distance(a, b) > 1e-6) CHECK(s > 0.0);
    CHECK(relative_entropy(a, a) == 0.0);
  }
}

TEST_CASE("general Ising with quadratic G reproduces the quadratic model's kernels") {
  double beta = 1.0;
  ModelSpec quad = build_ising_model(beta, {0.4, -0.2}, {0.7, 0.3});
  ModelSpec gen = build_general_ising_model(
      [beta](double m) { return -beta * m * m / 2; }, [beta](double m) { return -beta * m; },
      {0.4, -0.2}, {0.7, 0.3});
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    ProbabilityVector nu = oracles::random_simplex_point(2, rng);
    for (Index b = 0; b < 2; ++b)
      CHECK(sup_distance(gamma_kernel(quad, b, nu), gamma_kernel(gen, b, nu)) <= 1e-12);
  }
}

TEST_CASE("general Ising with G' = 0 leaves the a-priori kernels untouched") {
  ModelSpec model = build_general_ising_model([](double) { return 3.0; },
                                              [](double) { return 0.0; }, {0.5, -0.5});
  std::mt19937_64 rng(19);
  for (int t = 0; t < 10; ++t) {
    ProbabilityVector nu = oracles::random_simplex_point(2, rng);
    for (Index b = 0; b < 2; ++b)
      CHECK(sup_distance(gamma_kernel(model, b, nu), model.alpha(b)) <= 1e-15);
  }
}
