#pragma once

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treelimit/word.hpp"

namespace treelimit {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

using Rational = boost::rational<std::int64_t>;

/// Relative subtree size t(x,u) kept as the exact pair (|sigma(x,u)|, |x|).
struct SubtreeRatio {
  std::uint64_t size = 0;
  std::uint64_t total = 1;

  double value() const noexcept { return static_cast<double>(size) / static_cast<double>(total); }
  Rational exact() const {
    return Rational(static_cast<std::int64_t>(size), static_cast<std::int64_t>(total));
  }
};

/// A finite prefix-stable set of words with per-node subtree counts.
///
/// Nodes live in an arena indexed by NodeId in insertion order, so node `k`
/// is the (k+1)-th inserted word. Insertion walks the root path once to
/// update counts; nothing is ever removed.
class BinaryTree {
 public:
  struct Node {
    NodeId child[2] = {kNoNode, kNoNode};
    NodeId parent = kNoNode;
    std::uint32_t count = 1;
    std::uint32_t depth = 0;
  };

  /// The empty tree. Its boundary is {root}.
  BinaryTree() = default;
  static BinaryTree singleton();
  /// Inserts the words in order; each must lie on the boundary at its turn.
  static BinaryTree from_words(std::span<const Word> words);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t height() const;

  NodeId root() const noexcept { return nodes_.empty() ? kNoNode : 0; }
  NodeId child(NodeId id, bool bit) const noexcept { return nodes_[id].child[bit ? 1 : 0]; }
  NodeId parent(NodeId id) const noexcept { return nodes_[id].parent; }
  std::size_t count(NodeId id) const noexcept { return id == kNoNode ? 0 : nodes_[id].count; }
  std::size_t depth(NodeId id) const noexcept { return nodes_[id].depth; }
  const Node& node(NodeId id) const noexcept { return nodes_[id]; }

  NodeId find(const Word& u) const noexcept;
  bool contains(const Word& u) const noexcept { return find(u) != kNoNode; }
  Word word_of(NodeId id) const;

  /// Adds a boundary word. Throws std::invalid_argument on a duplicate or
  /// when the parent is missing.
  NodeId insert(const Word& v);
  /// Adds the `bit` child of an existing node; the child must be absent.
  NodeId insert_child(NodeId parent, bool bit);
  /// Adds the boundary node at left-to-right position `rank` (1-based) of a
  /// nonempty tree, updating counts on the way down.
  NodeId insert_at_rank(std::size_t rank);
  void reserve(std::size_t n) { nodes_.reserve(n); }

  std::size_t subtree_size(const Word& u) const noexcept { return count(find(u)); }
  /// t(x,u); throws std::domain_error for the empty tree.
  SubtreeRatio relative_size(const Word& u) const;
  double t(const Word& u) const { return relative_size(u).value(); }

  /// External boundary in lexicographic (left-to-right) order.
  std::vector<Word> boundary() const;
  /// All node words in preorder.
  std::vector<Word> words() const;
  /// sigma(x,u) rerooted at u; empty if u is not a node.
  BinaryTree subtree(const Word& u) const;

  /// Follows `next_bit()` from the root until the first absent node and
  /// returns (existing parent, direction). For the empty tree returns
  /// (kNoNode, false), denoting the root slot.
  template <class BitSource>
  std::pair<NodeId, bool> exit_slot(BitSource&& next_bit) const {
    if (nodes_.empty()) return {kNoNode, false};
    NodeId cur = 0;
    for (;;) {
      const bool bit = next_bit();
      const NodeId nxt = nodes_[cur].child[bit ? 1 : 0];
      if (nxt == kNoNode) return {cur, bit};
      cur = nxt;
    }
  }

  /// The boundary word where the path given by `next_bit` leaves the tree.
  template <class BitSource>
  Word exit_node(BitSource&& next_bit) const {
    auto [at, bit] = exit_slot(std::forward<BitSource>(next_bit));
    if (at == kNoNode) return Word{};
    return word_of(at).child(bit);
  }

  /// Code of the shape: two bits (has left, has right) per node in preorder.
  /// Equal codes iff equal word sets.
  std::string shape_code() const;

  friend bool operator==(const BinaryTree& a, const BinaryTree& b) {
    return a.shape_code() == b.shape_code();
  }

 private:
  std::vector<Node> nodes_;
};

/// Largest height accepted by complete_tree.
inline constexpr std::size_t kMaxCompleteHeight = 24;

/// All words of length <= h.
BinaryTree complete_tree(std::size_t h);

/// XOR relabelling {v.u : u in x}. `v` must supply at least height(x) bits.
BinaryTree group_act(const Word& v, const BinaryTree& x);

using WeightFunction = std::function<double(const Word&)>;

/// w(u) = 4^{-|u|}; sums to 2 over all words.
double default_weight(const Word& u);

/// d_w(x,y) = sum_u w(u) |t(x,u) - t(y,u)|. Only nodes of x or y contribute.
double tree_distance(const BinaryTree& x, const BinaryTree& y,
                     const WeightFunction& weight = default_weight);

}  // namespace treelimit
