#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "treelimit/measures.hpp"

using namespace treelimit;

namespace {

Word W(const char* s) { return Word::parse(s); }

/// mu_x(B_u) straight from the definition: each boundary word carries
/// 1/(|x|+1), spread uniformly over its cylinder.
oracle::Q boundary_mass_by_definition(const oracle::WordSet& x, const std::string& u) {
  const auto b = oracle::boundary(x);
  oracle::Q total(0);
  const oracle::Q share(1, static_cast<std::int64_t>(b.size()));
  for (const auto& v : b) {
    if (oracle::starts_with(v, u)) {
      total += share;
    } else if (oracle::starts_with(u, v)) {
      total += share / oracle::Q(std::int64_t{1} << (u.size() - v.size()));
    }
  }
  return total;
}

std::vector<Measure> builtins() {
  BinaryTree x = BinaryTree::singleton();
  x.insert(W("1"));
  x.insert(W("10"));
  return {uniform_measure(),        bernoulli_measure(0.3),       point_mass(W("0")),
          point_mass(W("011")),     boundary_measure(x),          sample_bst_limit(17),
          table_measure(2, {0.1, 0.2, 0.3, 0.4})};
}

}  // namespace

TEST(Measures, Uniform) {
  const Measure mu = uniform_measure();
  EXPECT_EQ(mu->mass(W("")), 1.0);
  EXPECT_EQ(mu->mass(W("010")), 0.125);
  EXPECT_EQ(mu->mass(W("01")), 0.25);
  EXPECT_EQ(*mu->exact_mass(W("101")), Rational(1, 8));
  EXPECT_EQ(mu->right_fraction(W("0110")), 0.5);
}

TEST(Measures, Bernoulli) {
  const double p = 0.3;
  const Measure mu = bernoulli_measure(p);
  EXPECT_NEAR(mu->mass(W("101")), p * p * (1 - p), 1e-15);
  EXPECT_NEAR(mu->mass(W("0")), 1 - p, 1e-15);
  EXPECT_EQ(mu->right_fraction(W("0011")), p);
  EXPECT_EQ(bernoulli_measure(0.5)->kind(), MeasureKind::uniform);
  EXPECT_THROW(bernoulli_measure(0.0), std::invalid_argument);
  EXPECT_THROW(bernoulli_measure(1.0), std::invalid_argument);
  EXPECT_THROW(bernoulli_measure(std::nan("")), std::invalid_argument);

  Word deep;
  for (int i = 0; i < 2000; ++i) deep.push_back(i % 3 == 0);
  const double ones = static_cast<double>(deep.count_ones());
  const double zeros = static_cast<double>(deep.size()) - ones;
  EXPECT_NEAR(mu->log_mass(deep), ones * std::log(p) + zeros * std::log(1 - p), 1e-8);
}

TEST(Measures, PointMass) {
  const Measure mu = point_mass(W("0"));
  EXPECT_EQ(mu->mass(W("00")), 1.0);
  EXPECT_EQ(mu->mass(W("1")), 0.0);
  EXPECT_EQ(mu->mass(W("")), 1.0);
  const Measure alt = point_mass(W("01"));
  EXPECT_EQ(alt->mass(W("01010")), 1.0);
  EXPECT_EQ(alt->mass(W("011")), 0.0);
  EXPECT_THROW(point_mass(W("")), std::invalid_argument);

  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    LazyWord v = sample_path(alt, rng);
    v.extend_to(9);
    EXPECT_EQ(v.prefix(), W("010101010"));
  }
  Word path;
  for (int d = 0; d < 40; ++d) {
    const double q = alt->right_fraction(path);
    EXPECT_TRUE(q == 0.0 || q == 1.0);
    EXPECT_EQ(alt->mass(path.child(false)) + alt->mass(path.child(true)), 1.0);
    path.push_back(q == 1.0);
  }
}

TEST(Measures, BoundaryMeasureExamples) {
  const Measure a = boundary_measure(BinaryTree::singleton());
  EXPECT_EQ(a->mass(W("0")), 0.5);
  BinaryTree x = BinaryTree::singleton();
  x.insert(W("0"));
  x.insert(W("1"));
  EXPECT_EQ(boundary_measure(x)->mass(W("0")), 0.5);
  EXPECT_EQ(*boundary_mass_exact(x, W("0")), Rational(1, 2));
  EXPECT_THROW(boundary_measure(BinaryTree()), std::invalid_argument);
}

TEST(Measures, BoundaryMeasureMatchesDefinition) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto model = oracle::random_tree(1 + gen() % 60, gen);
    const BinaryTree x = oracle::build(model);
    const Measure mu = boundary_measure(x);
    for (int k = 0; k < 30; ++k) {
      const auto u = oracle::random_bits(gen() % (x.height() + 4), gen);
      const auto want = boundary_mass_by_definition(model, u);
      const auto got = boundary_mass_exact(x, Word::parse(u));
      ASSERT_TRUE(got.has_value());
      EXPECT_EQ(got->numerator(), want.numerator());
      EXPECT_EQ(got->denominator(), want.denominator());
      EXPECT_NEAR(mu->mass(Word::parse(u)), boost::rational_cast<double>(want), 1e-14);

      const oracle::Q t(static_cast<std::int64_t>(oracle::subtree_size(model, u)),
                        static_cast<std::int64_t>(model.size()));
      EXPECT_GE(want - t, oracle::Q(0));
      EXPECT_LE(want - t, oracle::Q(1, static_cast<std::int64_t>(model.size() + 1)));
    }
  }
}

TEST(Measures, T0) {
  EXPECT_EQ(t0(BinaryTree::singleton(), W("0")), Rational(1, 2));
  EXPECT_EQ(t0(BinaryTree::singleton(), W("")), Rational(1));
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = oracle::random_tree(1 + gen() % 40, gen);
    const BinaryTree x = oracle::build(model);
    const auto b = oracle::boundary(model);
    std::vector<std::string> probes(model.begin(), model.end());
    probes.insert(probes.end(), b.begin(), b.end());
    const auto& u = probes[gen() % probes.size()];
    std::int64_t below = 0;
    for (const auto& v : b) below += oracle::starts_with(v, u) ? 1 : 0;
    const Rational want(below, static_cast<std::int64_t>(b.size()));
    EXPECT_EQ(t0(x, Word::parse(u)), want);
    EXPECT_EQ(t0(x, Word::parse(u)), *boundary_mass_exact(x, Word::parse(u)));
  }
}

TEST(Measures, BstLimit) {
  const Measure mu = sample_bst_limit(99);
  EXPECT_EQ(mu->mass(W("")), 1.0);
  const double eta = bst_limit_split(*mu, W(""));
  EXPECT_GT(eta, 0.0);
  EXPECT_LT(eta, 1.0);
  EXPECT_DOUBLE_EQ(mu->mass(W("0")), eta);
  EXPECT_DOUBLE_EQ(mu->mass(W("1")), 1.0 - eta);
  EXPECT_DOUBLE_EQ(mu->mass(W("01")), eta * (1.0 - bst_limit_split(*mu, W("0"))));
  EXPECT_THROW(bst_limit_split(*uniform_measure(), W("")), std::invalid_argument);

  // Queries in any order give the same answers.
  const Measure again = sample_bst_limit(99);
  EXPECT_EQ(again->mass(W("110101")), mu->mass(W("110101")));
  EXPECT_EQ(again->mass(W("0")), mu->mass(W("0")));
  EXPECT_NE(sample_bst_limit(100)->mass(W("0")), mu->mass(W("0")));
}

TEST(Measures, BstLimitMeanMasses) {
  Rng rng(5);
  const std::size_t samples = 20'000;
  const std::vector<Word> nodes = {W("0"), W("1"), W("01"), W("110")};
  std::vector<double> sum(nodes.size()), sum2(nodes.size());
  for (std::size_t i = 0; i < samples; ++i) {
    const Measure mu = sample_bst_limit(rng);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double m = mu->mass(nodes[j]);
      sum[j] += m;
      sum2[j] += m * m;
    }
  }
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double mean = sum[j] / samples;
    const double se = std::sqrt((sum2[j] / samples - mean * mean) / samples);
    EXPECT_NEAR(mean, std::ldexp(1.0, -static_cast<int>(nodes[j].size())), 5 * se);
  }
  // psi(0) and psi(1) have the same mean.
  EXPECT_NEAR(sum[0] / samples, sum[1] / samples,
              5 * 2.0 * std::sqrt(1.0 / 12.0 / samples));
}

TEST(Measures, Table) {
  const Measure left = table_measure(1, {1.0, 0.0});
  EXPECT_EQ(left->mass(W("0")), 1.0);
  EXPECT_EQ(left->mass(W("1")), 0.0);
  EXPECT_EQ(left->mass(W("00")), 0.5);
  const Measure flat = table_measure(0, {1.0});
  EXPECT_EQ(flat->mass(W("011")), 0.125);
  EXPECT_THROW(table_measure(1, {1.2, -0.2}), std::invalid_argument);
  EXPECT_THROW(table_measure(1, {0.4, 0.4}), std::invalid_argument);
  EXPECT_THROW(table_measure(2, {0.5, 0.5}), std::invalid_argument);

  const Measure b = bernoulli_measure(0.3);
  const auto masses = cylinder_masses(*b, 5);
  const auto round = cylinder_masses(*table_measure(5, masses), 5);
  for (std::size_t i = 0; i < masses.size(); ++i) EXPECT_NEAR(round[i], masses[i], 1e-15);
}

TEST(Measures, CylinderMasses) {
  EXPECT_EQ(cylinder_masses(*uniform_measure(), 2), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  EXPECT_EQ(cylinder_masses(*boundary_measure(BinaryTree::singleton()), 1),
            (std::vector<double>{0.5, 0.5}));
  for (const auto& mu : builtins()) {
    const auto m = cylinder_masses(*mu, 10);
    EXPECT_NEAR(std::accumulate(m.begin(), m.end(), 0.0), 1.0, 1e-9) << mu->describe();
    for (std::size_t i = 0; i < m.size(); i += 97) {
      Word u;
      for (std::size_t b = 10; b-- > 0;) u.push_back(((i >> b) & 1u) != 0);
      EXPECT_NEAR(m[i], mu->mass(u), 1e-15) << mu->describe();
    }
  }
  EXPECT_THROW(cylinder_masses(*uniform_measure(), kMaxCylinderDepth + 1), std::length_error);
}

TEST(Measures, Additivity) {
  for (const auto& mu : builtins()) {
    const auto report = check_additivity(*mu, 12, 1e-10);
    EXPECT_TRUE(report.passed) << mu->describe() << " defect " << report.max_defect;
  }
  EXPECT_EQ(check_additivity(*uniform_measure(), 12, 0.0).max_defect, 0.0);
  EXPECT_LE(check_additivity(*sample_bst_limit(3), 10, 1e-12).max_defect, 1e-12);

  const Measure corrupt = table_measure_unchecked({{1.0}, {0.5, 0.6}});
  const auto bad = check_additivity(*corrupt, 4, 1e-10);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.worst, W(""));
}

TEST(Measures, SamplePathFrequencies) {
  const std::size_t draws = 100'000;
  std::size_t outside = 0, pairs = 0;
  std::uint64_t seed = 1;
  for (const auto& mu : builtins()) {
    // Words of length 1..3; length `len` starts at offset 2^len - 2.
    std::vector<std::size_t> counts(14, 0);
    Rng rng(seed++);
    for (std::size_t i = 0; i < draws; ++i) {
      LazyWord v = sample_path(mu, rng);
      std::size_t code = 0;
      for (std::size_t len = 1; len <= 3; ++len) {
        code = code * 2 + (v.at(len - 1) ? 1 : 0);
        ++counts[(std::size_t{1} << len) - 2 + code];
      }
    }
    for (std::size_t len = 1; len <= 3; ++len) {
      for (std::size_t code = 0; code < (std::size_t{1} << len); ++code) {
        Word u;
        for (std::size_t b = len; b-- > 0;) u.push_back(((code >> b) & 1u) != 0);
        const double psi = mu->mass(u);
        const double freq = static_cast<double>(counts[(std::size_t{1} << len) - 2 + code]) / draws;
        ++pairs;
        if (std::abs(freq - psi) > 5 * std::sqrt(psi * (1 - psi) / draws) + 1e-12) ++outside;
      }
    }
  }
  EXPECT_GE(static_cast<double>(pairs - outside), 0.95 * static_cast<double>(pairs));
}

TEST(Measures, LazyWordIsStable) {
  LazyWord v(uniform_measure(), 7);
  v.extend_to(10);
  const Word first = v.prefix();
  v.extend_to(50);
  EXPECT_EQ(v.prefix().prefix(10), first);
  EXPECT_EQ(v.at(3), first[3]);
  EXPECT_EQ(v.prefix().size(), 50u);
}

TEST(Measures, Ultrametric) {
  EXPECT_EQ(ultrametric(W("0"), W("1")), 1.0);
  EXPECT_EQ(ultrametric(W("010"), W("011")), 0.25);
  EXPECT_EQ(ultrametric(W("011"), W("010")), 0.25);
  EXPECT_EQ(ultrametric(W("011"), W("011")), 0.0);
  EXPECT_THROW(ultrametric(W("01"), W("011")), std::domain_error);

  LazyWord a(uniform_measure(), 1), b(uniform_measure(), 2);
  const double d = ultrametric(a, b);
  const std::size_t k = common_prefix_length(a.prefix(), b.prefix());
  EXPECT_EQ(d, std::ldexp(1.0, -static_cast<int>(k)));
}

TEST(Measures, PositiveOnPath) {
  EXPECT_TRUE(positive_on_path(*uniform_measure(), W("0101")));
  EXPECT_FALSE(positive_on_path(*point_mass(W("0")), W("01")));
  EXPECT_TRUE(positive_on_path(*point_mass(W("0")), W("000")));
}
