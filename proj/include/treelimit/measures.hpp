#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treelimit/binary_tree.hpp"
#include "treelimit/rng.hpp"
#include "treelimit/word.hpp"

namespace treelimit {

enum class MeasureKind { uniform, bernoulli, point, boundary, bst_limit, table };

std::string to_string(MeasureKind kind);

/// Incremental view of a measure along one root path. Lets growth and
/// sampling query conditionals without rebuilding words at every step.
class PathCursor {
 public:
  virtual ~PathCursor() = default;
  /// Back to the root.
  virtual void reset() = 0;
  /// q at the current node: mu(B_{u1}) / mu(B_u), 0 where the mass vanishes.
  virtual double right_fraction() = 0;
  virtual void descend(bool bit) = 0;
  /// Draws the next bit with P(1) = right_fraction() and descends.
  virtual bool draw(Rng& rng) {
    const bool bit = rng.bernoulli(right_fraction());
    descend(bit);
    return bit;
  }
};

/// A probability measure on infinite bit sequences, given by its cylinder
/// masses psi(u) = mu(B_u) with psi(root) = 1 and psi(u) = psi(u0) + psi(u1).
///
/// Implementations are immutable after construction and safe to share
/// read-only across threads.
class DyadicMeasure {
 public:
  virtual ~DyadicMeasure() = default;

  virtual MeasureKind kind() const = 0;
  /// Mini-syntax form, e.g. "bernoulli:0.3".
  virtual std::string describe() const = 0;

  /// q(u) = mu(B_{u1}) / mu(B_u); 0 when mu(B_u) = 0.
  virtual double right_fraction(const Word& u) const = 0;

  /// mu(B_u). The default multiplies conditionals along the path and
  /// switches to log space beyond depth 64.
  virtual double mass(const Word& u) const;
  virtual double log_mass(const Word& u) const;
  /// Exact cylinder mass where the kind permits.
  virtual std::optional<Rational> exact_mass(const Word&) const { return std::nullopt; }

  virtual std::unique_ptr<PathCursor> cursor() const;
};

using Measure = std::shared_ptr<const DyadicMeasure>;

Measure uniform_measure();
/// Bernoulli model: i.i.d. bits with P(1) = p, 0 < p < 1.
Measure bernoulli_measure(double p);
/// delta_v for the infinite word repeating `pattern` periodically
/// ("0" -> 000..., "01" -> 0101...). The pattern must be nonempty.
Measure point_mass(const Word& pattern);
/// mu_x = (|x|+1)^{-1} sum over boundary nodes v of unif(B_v).
Measure boundary_measure(const BinaryTree& x);
/// Limit measure of BST growth: independent uniform left fractions at every
/// node, determined by `seed`.
Measure sample_bst_limit(std::uint64_t seed);
Measure sample_bst_limit(Rng& rng);
/// Masses of the 2^depth cylinders of depth `depth` in lexicographic order,
/// uniform splitting below. Rejects negative or non-normalized input.
Measure table_measure(std::size_t depth, std::vector<double> masses);

/// Table measure built from explicit per-level masses without consistency
/// checks. Only for negative-control fixtures.
Measure table_measure_unchecked(std::vector<std::vector<double>> levels);

/// Left fraction eta attached to the children of `u` in a bst-limit measure:
/// mu(B_{u0}) = eta * mu(B_u).
double bst_limit_split(const DyadicMeasure& mu, const Word& u);

/// Full support on a word and all of its prefixes.
bool positive_on_path(const DyadicMeasure& mu, const Word& u);

/// A random infinite word with law mu, realized one bit at a time.
class LazyWord {
 public:
  LazyWord(Measure mu, std::uint64_t seed);

  const Word& prefix() const noexcept { return prefix_; }
  bool next();
  void extend_to(std::size_t length);
  /// Bit i, realizing more of the word if needed.
  bool at(std::size_t i);

 private:
  Measure mu_;
  std::unique_ptr<PathCursor> cursor_;
  Rng rng_;
  Word prefix_;
};

LazyWord sample_path(const Measure& mu, Rng& rng);

/// Ultrametric 2^{-|v ^ w|} on finite representatives. Equal words give 0;
/// a strict prefix relation is rejected since divergence is undecided.
double ultrametric(const Word& v, const Word& w);
/// Extends both lazy words until they diverge (at most Word::kMaxDepth bits).
double ultrametric(LazyWord& v, LazyWord& w);

/// Masses of all depth-K cylinders in lexicographic order.
inline constexpr std::size_t kMaxCylinderDepth = 20;
std::vector<double> cylinder_masses(const DyadicMeasure& mu, std::size_t depth);

struct AdditivityReport {
  double max_defect = 0.0;
  Word worst;
  double tolerance = 0.0;
  bool passed = true;
};

/// max over |u| < depth of |psi(u) - psi(u0) - psi(u1)|, plus |psi(root) - 1|.
AdditivityReport check_additivity(const DyadicMeasure& mu, std::size_t depth, double tol);

/// mu_x(B_u) for the boundary measure of x, computed in place without
/// building the measure. x must be nonempty.
double boundary_mass(const BinaryTree& x, const Word& u);
std::optional<Rational> boundary_mass_exact(const BinaryTree& x, const Word& u);

/// Fraction of boundary nodes v of x with u <= v, as an exact ratio.
Rational t0(const BinaryTree& x, const Word& u);

}  // namespace treelimit
