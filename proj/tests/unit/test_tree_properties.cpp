#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "treelimit/binary_tree.hpp"

using namespace treelimit;

namespace {

double brute_distance(const oracle::WordSet& x, const oracle::WordSet& y) {
  oracle::WordSet all = x;
  all.insert(y.begin(), y.end());
  double d = 0.0;
  for (const auto& u : all) {
    const double tx = static_cast<double>(oracle::subtree_size(x, u)) / static_cast<double>(x.size());
    const double ty = static_cast<double>(oracle::subtree_size(y, u)) / static_cast<double>(y.size());
    d += std::pow(4.0, -static_cast<double>(u.size())) * std::abs(tx - ty);
  }
  return d;
}

}  // namespace

class TreeProperty : public ::testing::TestWithParam<int> {};

TEST_P(TreeProperty, MatchesStringModel) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = oracle::random_tree(1 + gen() % 100, gen);
    const BinaryTree x = oracle::build(model);
    ASSERT_EQ(oracle::words(x), model);
    ASSERT_TRUE(oracle::prefix_stable(oracle::words(x)));

    for (NodeId id = 0; id < x.size(); ++id) {
      EXPECT_EQ(x.count(id), 1 + x.count(x.child(id, false)) + x.count(x.child(id, true)));
    }
    for (const auto& u : model) {
      EXPECT_EQ(x.subtree_size(Word::parse(u)), oracle::subtree_size(model, u));
    }

    const auto b = x.boundary();
    oracle::WordSet bset;
    for (const auto& w : b) bset.insert(w.to_string());
    EXPECT_EQ(bset, oracle::boundary(model));
    EXPECT_EQ(b.size(), x.size() + 1);
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
  }
}

TEST_P(TreeProperty, RelativeSizeIsAdditive) {
  std::mt19937_64 gen(100 + static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryTree x = oracle::build(oracle::random_tree(1 + gen() % 80, gen));
    const Rational inv(1, static_cast<std::int64_t>(x.size()));
    for (const auto& u : x.words()) {
      EXPECT_EQ(x.relative_size(u).exact(),
                x.relative_size(u.child(false)).exact() + x.relative_size(u.child(true)).exact() + inv);
    }
    for (const auto& v : x.boundary()) EXPECT_EQ(x.relative_size(v).exact(), Rational(0));
  }
}

TEST_P(TreeProperty, ExitNodeIsTheBoundaryPrefix) {
  std::mt19937_64 gen(200 + static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = oracle::random_tree(1 + gen() % 100, gen);
    const BinaryTree x = oracle::build(model);
    for (int k = 0; k < 10; ++k) {
      const auto bits = oracle::random_bits(x.height() + 1, gen);
      std::size_t used = 0;
      const Word v = x.exit_node([&] { return bits.at(used++) == '1'; });
      EXPECT_EQ(v.to_string(), oracle::exit_by_scan(model, bits));
      EXPECT_LE(used, x.height() + 1);
    }
  }
}

TEST_P(TreeProperty, GroupActionPreservesStructure) {
  std::mt19937_64 gen(300 + static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryTree x = oracle::build(oracle::random_tree(1 + gen() % 60, gen));
    const Word v = Word::parse(oracle::random_bits(x.height() + 1, gen));
    const BinaryTree y = group_act(v, x);
    EXPECT_EQ(y.size(), x.size());
    std::map<std::size_t, std::size_t> dx, dy;
    for (const auto& w : x.words()) ++dx[w.size()];
    for (const auto& w : y.words()) ++dy[w.size()];
    EXPECT_EQ(dx, dy);

    oracle::WordSet acted;
    for (const auto& w : x.boundary()) acted.insert(xor_act(v, w).to_string());
    oracle::WordSet direct;
    for (const auto& w : y.boundary()) direct.insert(w.to_string());
    EXPECT_EQ(acted, direct);
    EXPECT_EQ(group_act(v, y), x);
  }
}

TEST_P(TreeProperty, DistanceIsAMetric) {
  std::mt19937_64 gen(400 + static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + gen() % 12;
    const auto mx = oracle::random_tree(n, gen);
    const auto my = oracle::random_tree(n, gen);
    const auto mz = oracle::random_tree(n, gen);
    const BinaryTree x = oracle::build(mx), y = oracle::build(my), z = oracle::build(mz);
    EXPECT_NEAR(tree_distance(x, y), brute_distance(mx, my), 1e-12);
    EXPECT_DOUBLE_EQ(tree_distance(x, y), tree_distance(y, x));
    EXPECT_LE(tree_distance(x, z), tree_distance(x, y) + tree_distance(y, z) + 1e-12);
    EXPECT_EQ(tree_distance(x, y) == 0.0, mx == my);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, TreeProperty, ::testing::Range(1, 6));
