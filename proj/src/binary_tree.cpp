#include "treelimit/binary_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treelimit {

BinaryTree BinaryTree::singleton() {
  BinaryTree x;
  x.insert(Word{});
  return x;
}

BinaryTree BinaryTree::from_words(std::span<const Word> words) {
  BinaryTree x;
  for (const auto& w : words) x.insert(w);
  return x;
}

std::size_t BinaryTree::height() const {
  std::size_t h = 0;
  for (const auto& n : nodes_) h = std::max<std::size_t>(h, n.depth);
  return h;
}

NodeId BinaryTree::find(const Word& u) const noexcept {
  if (nodes_.empty()) return kNoNode;
  NodeId cur = 0;
  for (std::size_t i = 0; i < u.size() && cur != kNoNode; ++i) {
    cur = nodes_[cur].child[u[i] ? 1 : 0];
  }
  return cur;
}

Word BinaryTree::word_of(NodeId id) const {
  std::vector<bool> rev;
  rev.reserve(nodes_[id].depth);
  while (nodes_[id].parent != kNoNode) {
    const NodeId p = nodes_[id].parent;
    rev.push_back(nodes_[p].child[1] == id);
    id = p;
  }
  Word w;
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) w.push_back(*it);
  return w;
}

NodeId BinaryTree::insert(const Word& v) {
  if (v.empty()) {
    if (!nodes_.empty()) throw std::invalid_argument("duplicate insertion of the root");
    nodes_.emplace_back();
    return 0;
  }
  const NodeId p = find(v.parent());
  if (p == kNoNode) {
    throw std::invalid_argument("cannot insert '" + v.to_string() +
                                "': parent is not in the tree");
  }
  if (nodes_[p].child[v.back() ? 1 : 0] != kNoNode) {
    throw std::invalid_argument("duplicate insertion of '" + v.to_string() + "'");
  }
  return insert_child(p, v.back());
}

NodeId BinaryTree::insert_child(NodeId parent, bool bit) {
  Node& p = nodes_[parent];
  if (p.child[bit ? 1 : 0] != kNoNode) {
    throw std::invalid_argument("insert_child: slot already occupied");
  }
  if (p.depth + 1 > Word::kMaxDepth) {
    throw std::length_error("tree depth exceeds the supported maximum of " +
                            std::to_string(Word::kMaxDepth));
  }
  if (nodes_.size() >= static_cast<std::size_t>(kNoNode) - 1) {
    throw std::length_error("tree size exceeds the node index range");
  }
  const auto id = static_cast<NodeId>(nodes_.size());
  Node n;
  n.parent = parent;
  n.depth = p.depth + 1;
  p.child[bit ? 1 : 0] = id;
  nodes_.push_back(n);
  for (NodeId a = parent; a != kNoNode; a = nodes_[a].parent) ++nodes_[a].count;
  return id;
}

NodeId BinaryTree::insert_at_rank(std::size_t rank) {
  if (nodes_.empty() || rank == 0 || rank > nodes_.size() + 1) {
    throw std::out_of_range("boundary rank " + std::to_string(rank) + " outside 1.." +
                            std::to_string(nodes_.size() + 1));
  }
  if (nodes_.size() >= static_cast<std::size_t>(kNoNode) - 1) {
    throw std::length_error("tree size exceeds the node index range");
  }
  NodeId cur = 0;
  int bit = 0;
  for (;;) {
    ++nodes_[cur].count;
    const NodeId left = nodes_[cur].child[0];
    const std::size_t left_slots = (left == kNoNode ? 0 : nodes_[left].count) + 1;
    bit = rank <= left_slots ? 0 : 1;
    if (bit == 1) rank -= left_slots;
    const NodeId next = nodes_[cur].child[bit];
    if (next == kNoNode) break;
    cur = next;
  }
  if (nodes_[cur].depth + 1 > Word::kMaxDepth) {
    for (NodeId a = cur; a != kNoNode; a = nodes_[a].parent) --nodes_[a].count;
    throw std::length_error("tree depth exceeds the supported maximum of " +
                            std::to_string(Word::kMaxDepth));
  }
  const auto fresh = static_cast<NodeId>(nodes_.size());
  Node n;
  n.parent = cur;
  n.depth = nodes_[cur].depth + 1;
  nodes_[cur].child[bit] = fresh;
  nodes_.push_back(n);
  return fresh;
}

SubtreeRatio BinaryTree::relative_size(const Word& u) const {
  if (nodes_.empty()) throw std::domain_error("t(x,u) is undefined for the empty tree");
  return {subtree_size(u), nodes_.size()};
}

std::vector<Word> BinaryTree::boundary() const {
  std::vector<Word> out;
  if (nodes_.empty()) {
    out.emplace_back();
    return out;
  }
  out.reserve(nodes_.size() + 1);
  // In-order traversal: left boundary slots come first.
  Word path;
  struct Frame {
    NodeId id;
    int stage;
  };
  std::vector<Frame> stack{{0, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.stage == 2) {
      stack.pop_back();
      if (!stack.empty()) path.pop_back();
      continue;
    }
    const bool bit = f.stage == 1;
    ++f.stage;
    const NodeId c = nodes_[f.id].child[bit ? 1 : 0];
    if (c == kNoNode) {
      out.push_back(path.child(bit));
    } else {
      path.push_back(bit);
      stack.push_back({c, 0});
    }
  }
  return out;
}

std::vector<Word> BinaryTree::words() const {
  std::vector<Word> out;
  if (nodes_.empty()) return out;
  out.reserve(nodes_.size());
  std::vector<std::pair<NodeId, Word>> stack{{0, Word{}}};
  while (!stack.empty()) {
    auto [id, w] = std::move(stack.back());
    stack.pop_back();
    for (int b = 1; b >= 0; --b) {
      if (nodes_[id].child[b] != kNoNode) stack.emplace_back(nodes_[id].child[b], w.child(b != 0));
    }
    out.push_back(std::move(w));
  }
  return out;
}

BinaryTree BinaryTree::subtree(const Word& u) const {
  BinaryTree out;
  const NodeId start = find(u);
  if (start == kNoNode) return out;
  out.nodes_.reserve(nodes_[start].count);
  out.insert(Word{});
  std::vector<std::pair<NodeId, NodeId>> stack{{start, 0}};
  while (!stack.empty()) {
    auto [src, dst] = stack.back();
    stack.pop_back();
    for (int b = 0; b < 2; ++b) {
      const NodeId c = nodes_[src].child[b];
      if (c != kNoNode) stack.emplace_back(c, out.insert_child(dst, b != 0));
    }
  }
  return out;
}

std::string BinaryTree::shape_code() const {
  std::string code;
  if (nodes_.empty()) return code;
  code.reserve(2 * nodes_.size());
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    code.push_back(n.child[0] != kNoNode ? '1' : '0');
    code.push_back(n.child[1] != kNoNode ? '1' : '0');
    if (n.child[1] != kNoNode) stack.push_back(n.child[1]);
    if (n.child[0] != kNoNode) stack.push_back(n.child[0]);
  }
  return code;
}

BinaryTree complete_tree(std::size_t h) {
  if (h > kMaxCompleteHeight) {
    throw std::length_error("complete_tree height " + std::to_string(h) +
                            " exceeds the limit " + std::to_string(kMaxCompleteHeight));
  }
  BinaryTree x = BinaryTree::singleton();
  // Breadth-first: nodes of depth d occupy a contiguous id range.
  NodeId level_begin = 0;
  NodeId level_end = 1;
  for (std::size_t d = 0; d < h; ++d) {
    for (NodeId id = level_begin; id < level_end; ++id) {
      x.insert_child(id, false);
      x.insert_child(id, true);
    }
    level_begin = level_end;
    level_end = static_cast<NodeId>(x.size());
  }
  return x;
}

BinaryTree group_act(const Word& v, const BinaryTree& x) {
  BinaryTree out;
  if (x.empty()) return out;
  if (v.size() < x.height()) {
    throw std::invalid_argument("group element supplies fewer bits than the tree height");
  }
  out.insert(Word{});
  std::vector<std::pair<NodeId, NodeId>> stack{{x.root(), 0}};
  while (!stack.empty()) {
    auto [src, dst] = stack.back();
    stack.pop_back();
    const bool flip = v.size() > x.depth(src) && v[x.depth(src)];
    for (int b = 0; b < 2; ++b) {
      const NodeId c = x.child(src, b != 0);
      if (c != kNoNode) stack.emplace_back(c, out.insert_child(dst, (b != 0) != flip));
    }
  }
  return out;
}

double default_weight(const Word& u) {
  return std::ldexp(1.0, -2 * static_cast<int>(u.size()));
}

double tree_distance(const BinaryTree& x, const BinaryTree& y, const WeightFunction& weight) {
  if (x.empty() || y.empty()) throw std::invalid_argument("tree_distance requires nonempty trees");
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  double total = 0.0;
  struct Frame {
    NodeId a;
    NodeId b;
    Word path;
  };
  std::vector<Frame> stack{{x.root(), y.root(), Word{}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const double tx = static_cast<double>(x.count(f.a)) / nx;
    const double ty = static_cast<double>(y.count(f.b)) / ny;
    total += weight(f.path) * std::abs(tx - ty);
    for (int bit = 0; bit < 2; ++bit) {
      const NodeId ca = f.a == kNoNode ? kNoNode : x.child(f.a, bit != 0);
      const NodeId cb = f.b == kNoNode ? kNoNode : y.child(f.b, bit != 0);
      if (ca != kNoNode || cb != kNoNode) stack.push_back({ca, cb, f.path.child(bit != 0)});
    }
  }
  return total;
}

}  // namespace treelimit
