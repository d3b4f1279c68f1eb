#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treelimit/binary_tree.hpp"
#include "treelimit/measures.hpp"
#include "treelimit/rng.hpp"

namespace treelimit {

/// A nested tree sequence X_1 = {root} < X_2 < ... < X_n, one node per step.
///
/// The final tree stores nodes in insertion order, so the word inserted at
/// step k (k >= 2) is node k-1 of the tree and the entry time of node id i
/// is i+1.
class Trajectory {
 public:
  Trajectory() : tree_(BinaryTree::singleton()) {}
  /// Takes ownership of a tree whose arena order is its insertion order.
  Trajectory(BinaryTree tree, std::string model, std::uint64_t seed)
      : tree_(std::move(tree)), model_(std::move(model)), seed_(seed) {}
  /// Replays v_2, ..., v_n; throws if some v_k is not on the boundary.
  static Trajectory replay(std::span<const Word> log, std::string model = "replay",
                           std::uint64_t seed = 0);

  std::size_t size() const noexcept { return tree_.size(); }
  const BinaryTree& tree() const noexcept { return tree_; }
  const std::string& model() const noexcept { return model_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Word inserted at step k, 1 <= k <= size(); step 1 is the root.
  Word inserted_at(std::size_t k) const;
  /// v_2, ..., v_n.
  std::vector<Word> log() const;
  /// X_k as a standalone tree.
  BinaryTree prefix_tree(std::size_t k) const;

 private:
  BinaryTree tree_;
  std::string model_ = "replay";
  std::uint64_t seed_ = 0;
};

/// First step k with u in X_k.
std::optional<std::size_t> entry_time(const Trajectory& tr, const Word& u);

/// DST(mu): each step routes a fresh mu-distributed word from the root and
/// inserts the exit node. Bits are drawn only until exit.
class DstGrower {
 public:
  explicit DstGrower(Measure mu) : mu_(std::move(mu)), cursor_(mu_->cursor()) {}
  NodeId step(BinaryTree& x, Rng& rng);
  void grow_to(BinaryTree& x, std::size_t n, Rng& rng);

 private:
  Measure mu_;
  std::unique_ptr<PathCursor> cursor_;
};

/// Inserts the boundary node at left-to-right position `rank` (1-based).
/// The subtree counts double as the order-statistic augmentation: the
/// subtree at u has count(u)+1 boundary slots.
NodeId insert_at_rank(BinaryTree& x, std::size_t rank);

/// BST growth: rank of the new value uniform on {1, ..., |x|+1}.
class BstGrower {
 public:
  NodeId step(BinaryTree& x, Rng& rng);
  void grow_to(BinaryTree& x, std::size_t n, Rng& rng);
};

Trajectory dst_grow(const Measure& mu, std::size_t n, Rng& rng);
Trajectory bst_grow(std::size_t n, Rng& rng);
/// BST from an explicit value stream: R_k = |{i <= k : xi_i <= xi_k}|.
/// Throws std::invalid_argument on tied values.
Trajectory bst_grow_from_values(std::span<const double> values, std::size_t n);

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t kMaxCatalanIndex = 1u << 16;

/// C_n = binom(2n, n) / (n+1), exact.
BigInt catalan(std::size_t n);
/// ln C_n.
double log_catalan(std::size_t n);

/// Exact P(L_n = k) = C_k C_{n-1-k} / C_n for the left size of a uniform
/// tree with n nodes, as a reduced pair (numerator, denominator).
std::pair<BigInt, BigInt> catalan_split_probability(std::size_t n, std::size_t k);

/// Uniform trees on B_n by recursive Catalan splits.
class UniformTreeSampler {
 public:
  explicit UniformTreeSampler(std::size_t max_n = 0) { reserve(max_n); }
  /// Left-subtree size of a uniform tree with n >= 1 nodes.
  std::size_t sample_split(std::size_t n, Rng& rng);
  BinaryTree sample(std::size_t n, Rng& rng);
  /// P(L_n = k) in floating point.
  double split_pmf(std::size_t n, std::size_t k);

 private:
  void reserve(std::size_t n);
  std::vector<double> log_catalan_;
};

BinaryTree uniform_tree(std::size_t n, Rng& rng);

/// Largest size for nested uniform growth; its rate table has m(m+1)/2
/// entries up to size m.
inline constexpr std::size_t kMaxRemySize = 4096;

/// Nested growth with X_k uniform on B_k for every k.
///
/// Each step routes from the root: at a node whose subtree has m nodes and
/// whose left subtree has j nodes, the new node goes left with probability
/// a_m(j). The a_m are the unique birth rates that carry the Catalan split
/// law of size m to that of size m+1; given the sizes, both subtrees stay
/// uniform and independent, so uniformity propagates by induction.
class RemyGrower {
 public:
  NodeId step(BinaryTree& x, Rng& rng);
  void grow_to(BinaryTree& x, std::size_t n, Rng& rng);
  /// a_m(j), for 1 <= m and 0 <= j < m.
  double left_rate(std::size_t m, std::size_t j);

 private:
  void extend(std::size_t m);
  std::vector<std::vector<double>> rates_;
};

Trajectory remy_grow(std::size_t n, Rng& rng);

struct TrajectoryProbability {
  double probability = 1.0;
  double log_probability = 0.0;
};

/// DST(mu) probability of the cylinder {X_1 = x_1, ..., X_n = x_n}:
/// product of mu(B_{v_i}) over the log.
TrajectoryProbability trajectory_probability(const DyadicMeasure& mu, const Trajectory& tr);

/// All trees of B_n in a fixed order (for exact reference classes).
std::vector<BinaryTree> enumerate_trees(std::size_t n);

/// All nested sequences from {root} to size n.
std::vector<Trajectory> enumerate_trajectories(std::size_t n);

}  // namespace treelimit
