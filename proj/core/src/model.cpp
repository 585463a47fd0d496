#include "metastate/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "metastate/errors.hpp"

namespace metastate {

InteractionFunctional make_quadratic_ising(double beta) {
  if (!(beta > 0.0)) throw ValidationError("quadratic Ising needs beta > 0");
  InteractionFunctional f;
  f.dimension = 2;
  f.value = [beta](std::span<const double> nu) {
    return -beta * (nu[0] * nu[0] + nu[1] * nu[1]);
  };
  f.gradient = [beta](std::span<const double> nu) {
    return std::vector<double>{-2.0 * beta * nu[0], -2.0 * beta * nu[1]};
  };
  f.hessian = [beta](std::span<const double>) {
    return Eigen::MatrixXd(-2.0 * beta * Eigen::MatrixXd::Identity(2, 2));
  };
  return f;
}

InteractionFunctional make_quadratic_potts(int q, double beta) {
  if (q < 2) throw ValidationError("Potts needs q >= 2");
  if (!(beta > 0.0)) throw ValidationError("quadratic Potts needs beta > 0");
  InteractionFunctional f;
  f.dimension = static_cast<Index>(q);
  f.value = [beta](std::span<const double> nu) {
    double s = 0.0;
    for (double x : nu) s += x * x;
    return -0.5 * beta * s;
  };
  f.gradient = [beta](std::span<const double> nu) {
    std::vector<double> g(nu.size());
    for (Index a = 0; a < nu.size(); ++a) g[a] = -beta * nu[a];
    return g;
  };
  f.hessian = [beta, q](std::span<const double>) {
    return Eigen::MatrixXd(-beta * Eigen::MatrixXd::Identity(q, q));
  };
  return f;
}

InteractionFunctional make_general_ising(std::function<double(double)> g,
                                         std::function<double(double)> g_prime,
                                         std::function<double(double)> g_second) {
  if (!g || !g_prime) throw ValidationError("general Ising needs G and G'");
  if (!g_second) {
    // G'' by central differences of G'; accurate enough for the Hessian
    // tolerance (1e-5 relative).
    g_second = [g_prime](double m) {
      const double h = 1e-5;
      return (g_prime(m + h) - g_prime(m - h)) / (2.0 * h);
    };
  }
  InteractionFunctional f;
  f.dimension = 2;
  f.value = [g](std::span<const double> nu) { return g(nu[0] - nu[1]); };
  f.gradient = [g_prime](std::span<const double> nu) {
    double d = g_prime(nu[0] - nu[1]);
    return std::vector<double>{d, -d};
  };
  f.hessian = [g_second](std::span<const double> nu) {
    double d2 = g_second(nu[0] - nu[1]);
    Eigen::MatrixXd h(2, 2);
    h << d2, -d2, -d2, d2;
    return h;
  };
  return f;
}

InteractionFunctional make_zero_interaction(Index dimension) {
  InteractionFunctional f;
  f.dimension = dimension;
  f.value = [](std::span<const double>) { return 0.0; };
  f.gradient = [dimension](std::span<const double>) {
    return std::vector<double>(dimension, 0.0);
  };
  f.hessian = [dimension](std::span<const double>) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Zero(dimension, dimension));
  };
  return f;
}

std::vector<ProbabilityVector> make_ising_field_kernels(const std::vector<double>& fields) {
  std::vector<ProbabilityVector> alpha;
  alpha.reserve(fields.size());
  for (double h : fields) {
    if (!std::isfinite(h)) throw ValidationError("field values must be finite");
    // exp(+-h) / (2 cosh h), written to avoid overflow for large |h|.
    double p_plus = 1.0 / (1.0 + std::exp(-2.0 * h));
    alpha.push_back(ProbabilityVector({p_plus, 1.0 - p_plus}));
  }
  return alpha;
}

ProbabilityVector potts_boost_kernel(int q, Index target_spin, double field_strength) {
  if (q < 2) throw ValidationError("Potts needs q >= 2");
  if (target_spin >= static_cast<Index>(q)) throw ValidationError("target spin out of range");
  double z = std::exp(field_strength) + static_cast<double>(q - 1);
  std::vector<double> e(static_cast<Index>(q), 1.0 / z);
  e[target_spin] = std::exp(field_strength) / z;
  return ProbabilityVector(std::move(e));
}

std::vector<ProbabilityVector> make_potts_field_kernels(int q, double field_strength) {
  std::vector<ProbabilityVector> alpha;
  alpha.reserve(static_cast<Index>(q));
  for (Index b = 0; b < static_cast<Index>(q); ++b)
    alpha.push_back(potts_boost_kernel(q, b, field_strength));
  return alpha;
}

ModelSpec::ModelSpec(Alphabet spin_alphabet, Alphabet disorder_alphabet,
                     InteractionFunctional f, std::vector<ProbabilityVector> alpha,
                     ProbabilityVector pi)
    : spins_(std::move(spin_alphabet)),
      disorder_(std::move(disorder_alphabet)),
      f_(std::move(f)),
      alpha_(std::move(alpha)),
      pi_(std::move(pi)) {
  if (spins_.size() < 2) throw ValidationError("spin alphabet needs at least 2 symbols");
  if (disorder_.size() < 1) throw ValidationError("disorder alphabet needs at least 1 symbol");
  if (!f_.value || !f_.gradient || !f_.hessian)
    throw ValidationError("interaction functional is incomplete");
  if (f_.dimension != spins_.size())
    throw ValidationError("interaction dimension does not match the spin alphabet");
  if (alpha_.size() != disorder_.size())
    throw ValidationError("need one a-priori kernel per disorder symbol");
  for (const auto& a : alpha_) {
    if (a.dim() != spins_.size())
      throw ValidationError("a-priori kernel dimension does not match the spin alphabet");
    if (!a.strictly_positive())
      throw ValidationError("a-priori kernels must be strictly positive");
  }
  if (pi_.dim() != disorder_.size())
    throw ValidationError("pi dimension does not match the disorder alphabet");
  if (!pi_.strictly_positive()) throw ValidationError("pi must be strictly positive");
}

ProbabilityVector gamma_kernel(const ModelSpec& model, Index b, const ProbabilityVector& nu) {
  if (b >= model.num_types()) throw ValidationError("disorder symbol out of range");
  if (nu.dim() != model.num_spins()) throw ValidationError("nu dimension mismatch");
  std::vector<double> grad = model.interaction().gradient(nu.entries());
  const ProbabilityVector& a = model.alpha(b);
  // Shift by max(-dF) so a constant added to the gradient cancels exactly.
  double top = -grad[0];
  for (Index i = 1; i < grad.size(); ++i) top = std::max(top, -grad[i]);
  std::vector<double> w(grad.size());
  double z = 0.0;
  for (Index i = 0; i < grad.size(); ++i) {
    w[i] = std::exp(-grad[i] - top) * a[i];
    z += w[i];
  }
  for (double& x : w) x /= z;
  return ProbabilityVector(std::move(w));
}

double relative_entropy(const ProbabilityVector& p, const ProbabilityVector& q) {
  if (p.dim() != q.dim()) throw ValidationError("dimension mismatch");
  if (!q.strictly_positive())
    throw ValidationError("relative entropy needs strictly positive reference");
  double s = 0.0;
  for (Index a = 0; a < p.dim(); ++a) {
    if (p[a] > 0.0) s += p[a] * std::log(p[a] / q[a]);
  }
  return std::max(s, 0.0);
}

namespace {

std::string format_field_label(double h) {
  std::ostringstream os;
  os << "h=" << h;
  return os.str();
}

Alphabet field_alphabet(const std::vector<double>& fields) {
  std::vector<std::string> labels;
  labels.reserve(fields.size());
  for (double h : fields) labels.push_back(format_field_label(h));
  return Alphabet(std::move(labels));
}

ProbabilityVector normalized_weights(std::vector<double> w, Index n) {
  if (w.empty()) return ProbabilityVector::uniform(n);
  if (w.size() != n) throw ValidationError("pi weight count does not match field count");
  double s = 0.0;
  for (double x : w) {
    if (!(x > 0.0)) throw ValidationError("pi weights must be positive");
    s += x;
  }
  for (double& x : w) x /= s;
  return ProbabilityVector(std::move(w));
}

}  // namespace

ModelSpec build_ising_model(double beta, const std::vector<double>& fields,
                            std::vector<double> pi_weights) {
  if (fields.empty()) throw ValidationError("need at least one field value");
  return ModelSpec(Alphabet({"+", "-"}), field_alphabet(fields), make_quadratic_ising(beta),
                   make_ising_field_kernels(fields),
                   normalized_weights(std::move(pi_weights), fields.size()));
}

ModelSpec build_general_ising_model(std::function<double(double)> g,
                                    std::function<double(double)> g_prime,
                                    const std::vector<double>& fields,
                                    std::vector<double> pi_weights,
                                    std::function<double(double)> g_second) {
  if (fields.empty()) throw ValidationError("need at least one field value");
  return ModelSpec(Alphabet({"+", "-"}), field_alphabet(fields),
                   make_general_ising(std::move(g), std::move(g_prime), std::move(g_second)),
                   make_ising_field_kernels(fields),
                   normalized_weights(std::move(pi_weights), fields.size()));
}

ModelSpec build_potts_model(int q, double beta, double field_strength) {
  Alphabet spins = Alphabet::numbered(static_cast<Index>(q));
  return ModelSpec(spins, spins, make_quadratic_potts(q, beta),
                   make_potts_field_kernels(q, field_strength),
                   ProbabilityVector::uniform(static_cast<Index>(q)));
}

}  // namespace metastate
