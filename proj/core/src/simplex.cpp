#include "metastate/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "metastate/errors.hpp"

namespace metastate {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw ValidationError("alphabet must not be empty");
}

Alphabet Alphabet::numbered(Index n, const std::string& prefix) {
  std::vector<std::string> s;
  s.reserve(n);
  for (Index i = 0; i < n; ++i) s.push_back(prefix + std::to_string(i + 1));
  return Alphabet(std::move(s));
}

ProbabilityVector::ProbabilityVector(std::vector<double> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("probability vector must not be empty");
  double sum = 0.0;
  for (double p : entries_) {
    if (!(p >= 0.0))
      throw ValidationError("probability vector has a negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance)
    throw ValidationError("probability vector does not sum to 1 within 1e-12");
}

bool ProbabilityVector::strictly_positive() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double p) { return p > 0.0; });
}

double ProbabilityVector::min_entry() const {
  return *std::min_element(entries_.begin(), entries_.end());
}

ProbabilityVector ProbabilityVector::uniform(Index n) {
  return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector ProbabilityVector::delta(Index n, Index i) {
  std::vector<double> e(n, 0.0);
  e.at(i) = 1.0;
  return ProbabilityVector(std::move(e));
}

ProbabilityVector ProbabilityVector::spike(Index n, Index i, double w) {
  std::vector<double> e(n, (1.0 - w) / static_cast<double>(n));
  e.at(i) += w;
  return ProbabilityVector(std::move(e));
}

TangentVector::TangentVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("tangent vector must not be empty");
  double sum = 0.0;
  for (double x : entries_) sum += x;
  if (std::abs(sum) > kSimplexTolerance)
    throw ValidationError("tangent vector does not sum to 0 within 1e-12");
}

TangentVector TangentVector::zero(Index n) {
  return TangentVector(std::vector<double>(n, 0.0));
}

TangentVector TangentVector::centered(std::vector<double> values) {
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= static_cast<double>(values.size());
  for (double& x : values) x -= mean;
  return TangentVector(std::move(values));
}

namespace {
template <typename V>
double sup_distance_impl(const V& a, const V& b) {
  double d = 0.0;
  for (Index i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}
}  // namespace

double sup_distance(const ProbabilityVector& a, const ProbabilityVector& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch");
  return sup_distance_impl(a, b);
}

double sup_distance(const TangentVector& a, const TangentVector& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch");
  return sup_distance_impl(a, b);
}

double tv_distance(const ProbabilityVector& a, const ProbabilityVector& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch");
  double s = 0.0;
  for (Index i = 0; i < a.dim(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

double dot(const TangentVector& a, const TangentVector& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch");
  double s = 0.0;
  for (Index i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double sup_norm(const TangentVector& a) {
  double m = 0.0;
  for (Index i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace metastate
