#include "treelimit/growth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treelimit {

Trajectory Trajectory::replay(std::span<const Word> log, std::string model, std::uint64_t seed) {
  BinaryTree x = BinaryTree::singleton();
  for (const auto& v : log) x.insert(v);
  return Trajectory(std::move(x), std::move(model), seed);
}

Word Trajectory::inserted_at(std::size_t k) const {
  if (k == 0 || k > tree_.size()) throw std::out_of_range("trajectory step out of range");
  return tree_.word_of(static_cast<NodeId>(k - 1));
}

std::vector<Word> Trajectory::log() const {
  std::vector<Word> out;
  if (tree_.size() > 1) out.reserve(tree_.size() - 1);
  for (std::size_t k = 2; k <= tree_.size(); ++k) out.push_back(inserted_at(k));
  return out;
}

BinaryTree Trajectory::prefix_tree(std::size_t k) const {
  if (k > tree_.size()) throw std::out_of_range("trajectory prefix longer than the trajectory");
  BinaryTree x;
  for (std::size_t i = 1; i <= k; ++i) x.insert(inserted_at(i));
  return x;
}

std::optional<std::size_t> entry_time(const Trajectory& tr, const Word& u) {
  const NodeId id = tr.tree().find(u);
  if (id == kNoNode) return std::nullopt;
  return static_cast<std::size_t>(id) + 1;
}

NodeId DstGrower::step(BinaryTree& x, Rng& rng) {
  if (x.empty()) return x.insert(Word{});
  cursor_->reset();
  NodeId cur = x.root();
  for (;;) {
    const bool bit = cursor_->draw(rng);
    const NodeId nxt = x.child(cur, bit);
    if (nxt == kNoNode) return x.insert_child(cur, bit);
    cur = nxt;
  }
}

void DstGrower::grow_to(BinaryTree& x, std::size_t n, Rng& rng) {
  while (x.size() < n) step(x, rng);
}

NodeId insert_at_rank(BinaryTree& x, std::size_t rank) {
  if (rank == 0 || rank > x.size() + 1) {
    throw std::out_of_range("boundary rank " + std::to_string(rank) + " outside 1.." +
                            std::to_string(x.size() + 1));
  }
  if (x.empty()) return x.insert(Word{});
  return x.insert_at_rank(rank);
}

NodeId BstGrower::step(BinaryTree& x, Rng& rng) {
  return insert_at_rank(x, 1 + rng.below(x.size() + 1));
}

void BstGrower::grow_to(BinaryTree& x, std::size_t n, Rng& rng) {
  x.reserve(n);
  while (x.size() < n) step(x, rng);
}

Trajectory dst_grow(const Measure& mu, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("trajectories start at size 1");
  BinaryTree x = BinaryTree::singleton();
  DstGrower grower(mu);
  grower.grow_to(x, n, rng);
  return Trajectory(std::move(x), "dst", 0);
}

Trajectory bst_grow(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("trajectories start at size 1");
  BinaryTree x = BinaryTree::singleton();
  BstGrower grower;
  grower.grow_to(x, n, rng);
  return Trajectory(std::move(x), "bst", 0);
}

Trajectory bst_grow_from_values(std::span<const double> values, std::size_t n) {
  if (n == 0) throw std::invalid_argument("trajectories start at size 1");
  if (values.size() < n) throw std::invalid_argument("fewer values than requested steps");
  BinaryTree x;
  std::vector<double> keys;
  keys.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = values[k];
    std::size_t rank = 1;
    NodeId cur = x.root();
    while (cur != kNoNode) {
      const double key = keys[cur];
      if (xi == key) throw std::invalid_argument("tied values in BST input");
      if (xi < key) {
        cur = x.child(cur, false);
      } else {
        rank += x.count(x.child(cur, false)) + 1;
        cur = x.child(cur, true);
      }
    }
    insert_at_rank(x, rank);
    keys.push_back(xi);
  }
  return Trajectory(std::move(x), "bst", 0);
}

BigInt catalan(std::size_t n) {
  if (n > kMaxCatalanIndex) throw std::length_error("catalan index too large");
  BigInt c = 1;
  for (std::size_t k = 0; k < n; ++k) {
    c = c * (2 * (2 * k + 1)) / (k + 2);
  }
  return c;
}

double log_catalan(std::size_t n) {
  const auto m = static_cast<double>(n);
  return std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0) - std::log(m + 1.0);
}

std::pair<BigInt, BigInt> catalan_split_probability(std::size_t n, std::size_t k) {
  if (n == 0 || k >= n) throw std::out_of_range("split index outside 0..n-1");
  BigInt num = catalan(k) * catalan(n - 1 - k);
  BigInt den = catalan(n);
  BigInt g = boost::multiprecision::gcd(num, den);
  return {num / g, den / g};
}

void UniformTreeSampler::reserve(std::size_t n) {
  for (std::size_t k = log_catalan_.size(); k <= n; ++k) log_catalan_.push_back(log_catalan(k));
}

double UniformTreeSampler::split_pmf(std::size_t n, std::size_t k) {
  reserve(n);
  return std::exp(log_catalan_[k] + log_catalan_[n - 1 - k] - log_catalan_[n]);
}

std::size_t UniformTreeSampler::sample_split(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("no split for the empty tree");
  reserve(n);
  // The split law is U-shaped, so scanning inward from both ends finds the
  // draw after O(sqrt n) terms on average.
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  while (lo < hi) {
    cum += split_pmf(n, lo);
    if (u < cum) return lo;
    cum += split_pmf(n, hi);
    if (u < cum) return hi;
    ++lo;
    --hi;
  }
  return lo;
}

BinaryTree UniformTreeSampler::sample(std::size_t n, Rng& rng) {
  BinaryTree x;
  if (n == 0) return x;
  struct Pending {
    NodeId parent;
    bool bit;
    std::size_t size;
  };
  x.insert(Word{});
  std::vector<Pending> stack;
  const std::size_t k0 = sample_split(n, rng);
  stack.push_back({0, true, n - 1 - k0});
  stack.push_back({0, false, k0});
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    if (p.size == 0) continue;
    const NodeId id = x.insert_child(p.parent, p.bit);
    const std::size_t k = sample_split(p.size, rng);
    stack.push_back({id, true, p.size - 1 - k});
    stack.push_back({id, false, k});
  }
  return x;
}

BinaryTree uniform_tree(std::size_t n, Rng& rng) {
  UniformTreeSampler sampler(n);
  return sampler.sample(n, rng);
}

void RemyGrower::extend(std::size_t m) {
  if (rates_.size() > m) return;
  if (m > kMaxRemySize) {
    throw std::length_error("nested uniform growth is limited to " + std::to_string(kMaxRemySize) +
                            " nodes");
  }
  if (rates_.empty()) rates_.emplace_back();  // m = 0 has no split.
  for (std::size_t size = rates_.size(); size <= m; ++size) {
    // Split law of `size` by its ratio recurrence, starting from C(size-1)/C(size).
    const auto s = static_cast<long double>(size);
    std::vector<long double> pmf(size);
    pmf[0] = (s + 1) / (2 * (2 * s - 1));
    for (std::size_t k = 0; k + 1 < size; ++k) {
      const auto kk = static_cast<long double>(k);
      pmf[k + 1] = pmf[k] * (2 * kk + 1) * (s - kk) / ((kk + 2) * (2 * s - 2 * kk - 3));
    }
    // Flow across the cut {<= j} | {> j} when the split law of `size`
    // becomes that of `size + 1`. Each term p_size(k) - p_size+1(k) equals
    // p_size(k) * 3(k+1) / ((size-k+1)(2 size+1)), so the sum has no cancellation.
    std::vector<double> row(size);
    long double flow = 0;
    for (std::size_t j = 0; j < size; ++j) {
      const auto jj = static_cast<long double>(j);
      flow += pmf[j] * 3 * (jj + 1) / ((s - jj + 1) * (2 * s + 1));
      const long double a = flow / pmf[j];
      if (a < -1e-9L || a > 1 + 1e-9L) {
        throw std::logic_error("nested uniform growth rate out of range at size " +
                               std::to_string(size));
      }
      row[j] = static_cast<double>(std::clamp(a, 0.0L, 1.0L));
    }
    rates_.push_back(std::move(row));
  }
}

double RemyGrower::left_rate(std::size_t m, std::size_t j) {
  if (m == 0 || j >= m) throw std::out_of_range("left_rate needs 0 <= j < m");
  extend(m);
  return rates_[m][j];
}

NodeId RemyGrower::step(BinaryTree& x, Rng& rng) {
  if (x.empty()) return x.insert(Word{});
  extend(x.size());
  NodeId cur = x.root();
  for (;;) {
    const std::size_t m = x.count(cur);
    const NodeId left = x.child(cur, false);
    const bool go_left = rng.uniform() < rates_[m][x.count(left)];
    const NodeId nxt = go_left ? left : x.child(cur, true);
    if (nxt == kNoNode) return x.insert_child(cur, !go_left);
    cur = nxt;
  }
}

void RemyGrower::grow_to(BinaryTree& x, std::size_t n, Rng& rng) {
  extend(n);
  while (x.size() < n) step(x, rng);
}

Trajectory remy_grow(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("trajectories start at size 1");
  BinaryTree x = BinaryTree::singleton();
  RemyGrower grower;
  grower.grow_to(x, n, rng);
  return Trajectory(std::move(x), "remy", 0);
}

TrajectoryProbability trajectory_probability(const DyadicMeasure& mu, const Trajectory& tr) {
  TrajectoryProbability out;
  for (std::size_t k = 2; k <= tr.size(); ++k) {
    const Word v = tr.inserted_at(k);
    out.probability *= mu.mass(v);
    out.log_probability += mu.log_mass(v);
  }
  return out;
}

std::vector<BinaryTree> enumerate_trees(std::size_t n) {
  // Words of every tree of each size, built bottom-up from the split.
  std::vector<std::vector<std::vector<Word>>> by_size(n + 1);
  by_size[0].push_back({});
  for (std::size_t m = 1; m <= n; ++m) {
    for (std::size_t k = 0; k < m; ++k) {
      for (const auto& left : by_size[k]) {
        for (const auto& right : by_size[m - 1 - k]) {
          std::vector<Word> words{Word{}};
          for (const auto& w : left) words.push_back(Word::parse("0") + w);
          for (const auto& w : right) words.push_back(Word::parse("1") + w);
          by_size[m].push_back(std::move(words));
        }
      }
    }
  }
  std::vector<BinaryTree> out;
  for (auto& words : by_size[n]) {
    std::stable_sort(words.begin(), words.end(),
                     [](const Word& a, const Word& b) { return a.size() < b.size(); });
    out.push_back(BinaryTree::from_words(words));
  }
  return out;
}

std::vector<Trajectory> enumerate_trajectories(std::size_t n) {
  if (n == 0) throw std::invalid_argument("trajectories start at size 1");
  std::vector<Trajectory> out;
  std::vector<Word> log;
  auto recurse = [&](auto&& self, const BinaryTree& x) -> void {
    if (x.size() == n) {
      out.push_back(Trajectory::replay(log, "enumerated"));
      return;
    }
    for (const auto& v : x.boundary()) {
      BinaryTree next = x;
      next.insert(v);
      log.push_back(v);
      self(self, next);
      log.pop_back();
    }
  };
  recurse(recurse, BinaryTree::singleton());
  return out;
}

}  // namespace treelimit
