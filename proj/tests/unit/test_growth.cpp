#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "treelimit/growth.hpp"
#include "treelimit/stats.hpp"

using namespace treelimit;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

Word W(const char* s) { return Word::parse(s); }

std::string as_key(const BinaryTree& x) {
  std::string key;
  for (const auto& w : oracle::words(x)) key += w + "|";
  return key;
}

std::string as_key(const oracle::WordSet& x) {
  std::string key;
  for (const auto& w : x) key += w + "|";
  return key;
}

/// Class index of every tree of size n, in oracle enumeration order.
std::map<std::string, std::size_t> class_index(std::size_t n) {
  std::map<std::string, std::size_t> index;
  for (const auto& x : oracle::all_trees(n)) index.emplace(as_key(x), index.size());
  return index;
}

cpp_rational exact_split(std::size_t n, std::size_t k) {
  const auto c = [](std::size_t m) {
    cpp_int num = 1;
    for (std::size_t i = m + 2; i <= 2 * m; ++i) num *= i;
    cpp_int den = 1;
    for (std::size_t i = 2; i <= m; ++i) den *= i;
    return cpp_int(num / den);
  };
  return cpp_rational(c(k) * c(n - 1 - k), c(n));
}

}  // namespace

TEST(Trajectory, ReplayAndAccessors) {
  const std::vector<Word> log = {W("0"), W("01"), W("1")};
  const Trajectory tr = Trajectory::replay(log, "test", 9);
  EXPECT_EQ(tr.size(), 4u);
  EXPECT_EQ(tr.inserted_at(1), W(""));
  EXPECT_EQ(tr.inserted_at(3), W("01"));
  EXPECT_EQ(tr.log(), log);
  EXPECT_EQ(tr.prefix_tree(2).size(), 2u);
  EXPECT_EQ(tr.seed(), 9u);
  EXPECT_EQ(*entry_time(tr, W("")), 1u);
  EXPECT_EQ(*entry_time(tr, W("1")), 4u);
  EXPECT_FALSE(entry_time(tr, W("11")).has_value());
  const std::vector<Word> bad = {W("00")};
  EXPECT_THROW(Trajectory::replay(bad), std::invalid_argument);
}

TEST(Dst, PointMassGivesLeftChain) {
  Rng rng(1);
  const Trajectory tr = dst_grow(point_mass(W("0")), 4, rng);
  EXPECT_EQ(tr.log(), (std::vector<Word>{W("0"), W("00"), W("000")}));
  EXPECT_TRUE(dst_grow(uniform_measure(), 1, rng).log().empty());
}

TEST(Dst, SecondWordIsAFairBit) {
  std::size_t left = 0;
  const std::size_t runs = 10'000;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(derive_seed(77, r));
    left += dst_grow(uniform_measure(), 2, rng).inserted_at(2) == W("0") ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(left) / runs, 0.5, 3 * std::sqrt(0.25 / runs));
}

TEST(Dst, Reproducible) {
  Rng a(5), b(5);
  EXPECT_EQ(dst_grow(bernoulli_measure(0.3), 500, a).log(), dst_grow(bernoulli_measure(0.3), 500, b).log());
}

TEST(Bst, RankInsertionMatchesBoundaryOrder) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = oracle::random_tree(1 + gen() % 50, gen);
    BinaryTree x = oracle::build(model);
    const auto b = oracle::boundary(model);
    const std::size_t rank = 1 + gen() % b.size();
    auto it = b.begin();
    std::advance(it, static_cast<long>(rank - 1));
    const NodeId id = insert_at_rank(x, rank);
    EXPECT_EQ(x.word_of(id).to_string(), *it);
  }
}

TEST(Bst, SmallLaws) {
  Rng rng(3);
  EXPECT_EQ(bst_grow(1, rng).size(), 1u);
  std::size_t left = 0;
  for (int r = 0; r < 10'000; ++r) left += bst_grow(2, rng).tree().contains(W("0")) ? 1 : 0;
  EXPECT_NEAR(left / 1e4, 0.5, 3 * std::sqrt(0.25 / 1e4));

  // Exact law on B_3 from the 2 * 3 rank sequences.
  const auto index = class_index(3);
  std::vector<double> probs(index.size(), 0.0);
  for (std::size_t r2 = 1; r2 <= 2; ++r2) {
    for (std::size_t r3 = 1; r3 <= 3; ++r3) {
      oracle::WordSet x = {""};
      for (std::size_t r : {r2, r3}) {
        const auto b = oracle::boundary(x);
        auto it = b.begin();
        std::advance(it, static_cast<long>(r - 1));
        x.insert(*it);
      }
      probs[index.at(as_key(x))] += 1.0 / 6.0;
    }
  }
  EXPECT_DOUBLE_EQ(probs[index.at(as_key(oracle::WordSet{"", "0", "1"}))], 1.0 / 3.0);

  std::vector<std::uint64_t> counts(index.size(), 0);
  for (int r = 0; r < 10'000; ++r) ++counts[index.at(as_key(bst_grow(3, rng).tree()))];
  EXPECT_GT(stats::chi_square_gof(counts, probs).p_value, 0.01);
}

TEST(Bst, FromValues) {
  const std::vector<double> v = {0.5, 0.2, 0.8};
  EXPECT_EQ(bst_grow_from_values(v, 3).log(), (std::vector<Word>{W("0"), W("1")}));
  const std::vector<double> up = {1, 2, 3, 4};
  EXPECT_EQ(bst_grow_from_values(up, 4).log(), (std::vector<Word>{W("1"), W("11"), W("111")}));
  const std::vector<double> tie = {0.3, 0.1, 0.3};
  EXPECT_THROW(bst_grow_from_values(tie, 3), std::invalid_argument);

  const auto index = class_index(3);
  std::vector<std::uint64_t> a(index.size(), 0), b(index.size(), 0);
  Rng rng(8);
  for (int r = 0; r < 10'000; ++r) {
    const std::vector<double> xi = {rng.uniform(), rng.uniform(), rng.uniform()};
    ++a[index.at(as_key(bst_grow_from_values(xi, 3).tree()))];
    ++b[index.at(as_key(bst_grow(3, rng).tree()))];
  }
  EXPECT_GT(stats::chi_square_two_sample(a, b).p_value, 0.01);
}

TEST(Catalan, Values) {
  EXPECT_EQ(catalan(0), 1);
  EXPECT_EQ(catalan(3), 5);
  EXPECT_EQ(catalan(10), 16796);
  const auto table = oracle::catalan_table(35);
  for (std::size_t n = 0; n <= 35; ++n) EXPECT_EQ(catalan(n), cpp_int(table[n])) << n;
  // C_100 from the recurrence in big integers.
  std::vector<cpp_int> c(101);
  c[0] = 1;
  for (std::size_t m = 1; m <= 100; ++m) {
    for (std::size_t k = 0; k < m; ++k) c[m] += c[k] * c[m - 1 - k];
  }
  EXPECT_EQ(catalan(100), c[100]);
  EXPECT_NEAR(log_catalan(100), std::log(c[100].convert_to<double>()), 1e-9);
}

TEST(Catalan, SplitProbability) {
  for (std::size_t n = 1; n <= 12; ++n) {
    cpp_rational total = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto [num, den] = catalan_split_probability(n, k);
      const cpp_rational p(num, den);
      EXPECT_EQ(p, exact_split(n, k));
      total += p;
    }
    EXPECT_EQ(total, 1);
  }
  UniformTreeSampler sampler(50);
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_NEAR(sampler.split_pmf(50, k), exact_split(50, k).convert_to<double>(), 1e-12);
  }
}

TEST(UniformTree, SmallLaws) {
  Rng rng(2);
  EXPECT_TRUE(uniform_tree(0, rng).empty());
  const auto index = class_index(3);
  std::vector<std::uint64_t> counts(index.size(), 0);
  const std::size_t runs = 100'000;
  for (std::size_t r = 0; r < runs; ++r) ++counts[index.at(as_key(uniform_tree(3, rng)))];
  for (auto c : counts) EXPECT_NEAR(c / double(runs), 0.2, 3 * std::sqrt(0.16 / runs));

  UniformTreeSampler sampler(8);
  std::vector<std::uint64_t> split(8, 0);
  std::vector<double> probs(8);
  for (std::size_t k = 0; k < 8; ++k) probs[k] = exact_split(8, k).convert_to<double>();
  for (int r = 0; r < 50'000; ++r) ++split[sampler.sample_split(8, rng)];
  EXPECT_GT(stats::chi_square_gof(split, probs).p_value, 0.01);
}

TEST(Remy, RatesMatchExactArithmetic) {
  RemyGrower grower;
  for (std::size_t m = 1; m <= 25; ++m) {
    cpp_rational lower_now = 0, lower_next = 0;
    for (std::size_t j = 0; j < m; ++j) {
      lower_now += exact_split(m, j);
      lower_next += exact_split(m + 1, j);
      const cpp_rational a = (lower_now - lower_next) / exact_split(m, j);
      EXPECT_NEAR(grower.left_rate(m, j), a.convert_to<double>(), 1e-12) << m << "," << j;
    }
  }
  for (std::size_t m = 1; m <= 300; m += 7) {
    for (std::size_t j = 0; j < m; ++j) {
      const double a = grower.left_rate(m, j);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
  }
  EXPECT_THROW(grower.left_rate(3, 3), std::out_of_range);
}

TEST(Remy, ExactMarginalsAreUniform) {
  // Push the exact law through the routing rule and compare with 1/C_k.
  RemyGrower grower;
  std::map<std::string, std::pair<oracle::WordSet, double>> law;
  law[as_key(oracle::WordSet{""})] = {oracle::WordSet{""}, 1.0};
  for (std::size_t k = 1; k < 7; ++k) {
    std::map<std::string, std::pair<oracle::WordSet, double>> next;
    for (const auto& [key, entry] : law) {
      const auto& [x, p] = entry;
      // Distribution of the exit word from the root.
      std::vector<std::pair<std::string, double>> frontier = {{"", p}};
      while (!frontier.empty()) {
        auto [u, q] = frontier.back();
        frontier.pop_back();
        if (!x.count(u)) {
          oracle::WordSet y = x;
          y.insert(u);
          auto& slot = next[as_key(y)];
          slot.first = y;
          slot.second += q;
          continue;
        }
        const std::size_t m = oracle::subtree_size(x, u);
        const double a = grower.left_rate(m, oracle::subtree_size(x, u + "0"));
        frontier.push_back({u + "0", q * a});
        frontier.push_back({u + "1", q * (1 - a)});
      }
    }
    law = std::move(next);
    const double want = 1.0 / catalan(k + 1).convert_to<double>();
    EXPECT_EQ(law.size(), catalan(k + 1));
    for (const auto& [key, entry] : law) EXPECT_NEAR(entry.second, want, 1e-12) << key;
  }
}

TEST(Remy, NestedAndUniformAtFour) {
  Rng rng(6);
  EXPECT_EQ(remy_grow(1, rng).size(), 1u);
  const Trajectory tr = remy_grow(200, rng);
  EXPECT_NO_THROW(Trajectory::replay(tr.log()));
  EXPECT_THROW(remy_grow(kMaxRemySize + 1, rng), std::length_error);

  const auto index = class_index(4);
  ASSERT_EQ(index.size(), 14u);
  std::vector<std::uint64_t> counts(14, 0);
  for (int r = 0; r < 30'000; ++r) ++counts[index.at(as_key(remy_grow(4, rng).tree()))];
  EXPECT_GT(stats::chi_square_gof(counts, std::vector<double>(14, 1.0 / 14)).p_value, 0.01);
}

TEST(TrajectoryProbability, Examples) {
  const std::vector<Word> one = {W("0")};
  EXPECT_DOUBLE_EQ(trajectory_probability(*uniform_measure(), Trajectory::replay(one)).probability, 0.5);
  EXPECT_DOUBLE_EQ(trajectory_probability(*uniform_measure(), Trajectory()).probability, 1.0);
  const std::vector<Word> log = {W("1"), W("10")};
  const auto p = trajectory_probability(*bernoulli_measure(0.3), Trajectory::replay(log));
  EXPECT_NEAR(p.probability, 0.3 * 0.3 * 0.7, 1e-15);
  EXPECT_NEAR(p.log_probability, std::log(0.3 * 0.3 * 0.7), 1e-12);
}

TEST(TrajectoryProbability, SumsToOne) {
  std::size_t factorial = 1;
  for (std::size_t n = 1; n <= 5; ++n) {
    factorial *= n;
    const auto all = enumerate_trajectories(n);
    EXPECT_EQ(all.size(), factorial);
    for (const auto& mu : {uniform_measure(), bernoulli_measure(0.3)}) {
      double total = 0.0;
      for (const auto& tr : all) total += trajectory_probability(*mu, tr).probability;
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Enumeration, TreesMatchOracle) {
  for (std::size_t n = 0; n <= 6; ++n) {
    const auto trees = enumerate_trees(n);
    EXPECT_EQ(trees.size(), catalan(n));
    std::set<std::string> keys;
    for (const auto& x : trees) keys.insert(as_key(x));
    std::set<std::string> want;
    for (const auto& x : oracle::all_trees(n)) want.insert(as_key(x));
    EXPECT_EQ(keys, want);
  }
}

TEST(EntryTime, Geometric) {
  const std::size_t runs = 10'000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(derive_seed(31, r));
    BinaryTree x = BinaryTree::singleton();
    DstGrower grower(uniform_measure());
    while (!x.contains(W("0"))) grower.step(x, rng);
    const double tau = static_cast<double>(x.size());
    sum += tau - 1;
    sum2 += (tau - 1) * (tau - 1);
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sum2 / runs - mean * mean) / runs);
  EXPECT_NEAR(mean, 2.0, 3 * se);
}
