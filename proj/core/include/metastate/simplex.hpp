#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace metastate {

using Index = std::size_t;

/// Tolerance for the sum-to-one / sum-to-zero constraints.
inline constexpr double kSimplexTolerance = 1e-12;

/// Ordered finite alphabet. Symbols are labels for I/O only; all numerics
/// work with positions in this fixed order.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  Index size() const { return symbols_.size(); }
  const std::string& symbol(Index i) const { return symbols_[i]; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  bool operator==(const Alphabet&) const = default;

  static Alphabet numbered(Index n, const std::string& prefix = "");

 private:
  std::vector<std::string> symbols_;
};

/// A point of the simplex P(S) over a finite alphabet: nonnegative entries
/// summing to one within kSimplexTolerance.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(std::vector<double> entries);

  Index dim() const { return entries_.size(); }
  double operator[](Index i) const { return entries_[i]; }
  std::span<const double> entries() const { return entries_; }
  const std::vector<double>& raw() const { return entries_; }

  bool strictly_positive() const;
  double min_entry() const;

  bool operator==(const ProbabilityVector&) const = default;

  static ProbabilityVector uniform(Index n);
  static ProbabilityVector delta(Index n, Index i);
  /// w * delta_i + (1-w) * uniform.
  static ProbabilityVector spike(Index n, Index i, double w);

 private:
  std::vector<double> entries_;
};

/// An element of the tangent space T P(S): entries summing to zero.
class TangentVector {
 public:
  TangentVector() = default;
  explicit TangentVector(std::vector<double> entries);

  Index dim() const { return entries_.size(); }
  double operator[](Index i) const { return entries_[i]; }
  std::span<const double> entries() const { return entries_; }
  const std::vector<double>& raw() const { return entries_; }

  static TangentVector zero(Index n);
  /// Centers an arbitrary vector by subtracting its mean.
  static TangentVector centered(std::vector<double> values);

 private:
  std::vector<double> entries_;
};

double sup_distance(const ProbabilityVector& a, const ProbabilityVector& b);
double sup_distance(const TangentVector& a, const TangentVector& b);
/// Total variation distance (half the l1 distance).
double tv_distance(const ProbabilityVector& a, const ProbabilityVector& b);
double dot(const TangentVector& a, const TangentVector& b);
double sup_norm(const TangentVector& a);

}  // namespace metastate
