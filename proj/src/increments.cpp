#include "treelimit/increments.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace treelimit {

IncrementProcess extract_increments(const Trajectory& tr, const Word& u, std::size_t horizon) {
  const BinaryTree& x = tr.tree();
  const NodeId id = x.find(u);
  if (id == kNoNode) {
    throw std::invalid_argument("node '" + u.to_string() + "' never enters the trajectory");
  }
  IncrementProcess y;
  y.node = u;
  y.origin = static_cast<std::size_t>(id) + 1;
  const std::size_t steps = std::min(horizon, x.size() - y.origin);
  const std::size_t last = y.origin + steps;  // exclusive bound on node ids

  std::vector<std::int8_t> side(last, 0);
  for (int b = 0; b < 2; ++b) {
    const std::int8_t mark = b == 0 ? -1 : 1;
    std::vector<NodeId> stack;
    if (const NodeId c = x.child(id, b != 0); c != kNoNode) stack.push_back(c);
    while (!stack.empty()) {
      const NodeId cur = stack.back();
      stack.pop_back();
      // Descendants always enter after their ancestors.
      if (cur >= last) continue;
      side[cur] = mark;
      for (int cb = 0; cb < 2; ++cb) {
        if (const NodeId c = x.child(cur, cb != 0); c != kNoNode) stack.push_back(c);
      }
    }
  }
  y.values.assign(side.begin() + static_cast<std::ptrdiff_t>(y.origin), side.end());
  return y;
}

Pmf3 increment_pmf(const DyadicMeasure& mu, const Word& u) {
  if (!(mu.mass(u) > 0.0)) {
    throw std::invalid_argument("increment pmf undefined at zero-mass node '" + u.to_string() +
                                "'");
  }
  const double left = mu.mass(u.child(false));
  const double right = mu.mass(u.child(true));
  return {left, 1.0 - left - right, right};
}

Pmf3 empirical_pmf(std::span<const std::int8_t> values) {
  if (values.empty()) throw std::invalid_argument("empirical pmf of an empty process");
  std::array<std::size_t, 3> counts{};
  for (auto v : values) ++counts[static_cast<std::size_t>(v + 1)];
  const auto n = static_cast<double>(values.size());
  return {static_cast<double>(counts[0]) / n, static_cast<double>(counts[1]) / n,
          static_cast<double>(counts[2]) / n};
}

Pmf3 empirical_pmf(const IncrementProcess& y) { return empirical_pmf(y.values); }

std::size_t reconstruct_subtree_size(const IncrementProcess& y, std::size_t n) {
  if (n > y.values.size()) throw std::out_of_range("reconstruction beyond the extracted horizon");
  std::size_t s = 1;
  for (std::size_t j = 0; j < n; ++j) s += y.values[j] != 0 ? 1 : 0;
  return s;
}

namespace {

std::size_t pattern_count(std::size_t block_len) {
  std::size_t c = 1;
  for (std::size_t i = 0; i < block_len; ++i) c *= 3;
  return c;
}

void count_blocks(std::span<const std::int8_t> values, std::size_t block_len, std::size_t blocks,
                  std::vector<std::uint64_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t code = 0;
    for (std::size_t i = 0; i < block_len; ++i) {
      code = code * 3 + static_cast<std::size_t>(values[b * block_len + i] + 1);
    }
    ++counts[code];
  }
}

double discrepancy(const std::vector<std::uint64_t>& counts, const std::vector<double>& expected) {
  double t = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (expected[c] <= 0.0) continue;
    const double d = static_cast<double>(counts[c]) - expected[c];
    t += d * d / expected[c];
  }
  return t;
}

}  // namespace

ExchangeabilityReport exchangeability_statistic(std::span<const std::int8_t> values,
                                                std::size_t block_len, std::size_t num_shuffles,
                                                Rng& rng) {
  if (block_len == 0 || block_len > 8) throw std::invalid_argument("block length must be in 1..8");
  if (values.size() < 2 * block_len) {
    throw std::invalid_argument("sequence too short for the exchangeability diagnostic");
  }
  for (auto v : values) {
    if (v < -1 || v > 1) throw std::invalid_argument("increment values must be -1, 0 or +1");
  }
  ExchangeabilityReport report;
  report.block_len = block_len;
  report.blocks = values.size() / block_len;
  report.shuffles = num_shuffles;

  std::array<double, 3> totals{};
  for (auto v : values) totals[static_cast<std::size_t>(v + 1)] += 1.0;
  const auto n = static_cast<double>(values.size());

  // Probability of each pattern in a fixed block under a uniformly random
  // rearrangement of the multiset: sampling without replacement.
  const std::size_t patterns = pattern_count(block_len);
  std::vector<double> expected(patterns);
  for (std::size_t code = 0; code < patterns; ++code) {
    std::array<double, 3> used{};
    std::size_t rest = code;
    std::vector<std::size_t> symbols(block_len);
    for (std::size_t i = block_len; i-- > 0;) {
      symbols[i] = rest % 3;
      rest /= 3;
    }
    double p = 1.0;
    for (std::size_t i = 0; i < block_len; ++i) {
      p *= (totals[symbols[i]] - used[symbols[i]]) / (n - static_cast<double>(i));
      used[symbols[i]] += 1.0;
    }
    expected[code] = p * static_cast<double>(report.blocks);
  }

  std::vector<std::uint64_t> counts(patterns);
  count_blocks(values, block_len, report.blocks, counts);
  report.statistic = discrepancy(counts, expected);

  std::vector<std::int8_t> work(values.begin(), values.end());
  std::size_t at_least = 0;
  for (std::size_t s = 0; s < num_shuffles; ++s) {
    for (std::size_t i = work.size() - 1; i > 0; --i) {
      std::swap(work[i], work[rng.below(i + 1)]);
    }
    count_blocks(work, block_len, report.blocks, counts);
    if (discrepancy(counts, expected) >= report.statistic) ++at_least;
  }
  report.p_value =
      static_cast<double>(1 + at_least) / static_cast<double>(1 + num_shuffles);
  return report;
}

bool is_boundary_partition(std::span<const Word> cells) {
  if (cells.size() < 2) return false;
  std::unordered_set<Word> cell_set(cells.begin(), cells.end());
  if (cell_set.size() != cells.size()) return false;
  std::unordered_set<Word> interior;
  for (const auto& c : cells) {
    for (std::size_t len = 0; len < c.size(); ++len) interior.insert(c.prefix(len));
  }
  std::vector<Word> nodes(interior.begin(), interior.end());
  std::sort(nodes.begin(), nodes.end(),
            [](const Word& a, const Word& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
  for (const auto& c : cells) {
    if (interior.contains(c)) return false;
  }
  const BinaryTree x = BinaryTree::from_words(nodes);
  std::vector<Word> boundary = x.boundary();
  std::vector<Word> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());
  return boundary == sorted;
}

CombinedProcess combine_partition_process(const Trajectory& tr, std::span<const Word> cells) {
  if (!is_boundary_partition(cells)) {
    throw std::invalid_argument("cells do not form the boundary of a nonempty tree");
  }
  CombinedProcess out;
  out.cells.assign(cells.begin(), cells.end());
  std::vector<std::size_t> tau;
  for (const auto& c : cells) {
    const auto t = entry_time(tr, c);
    if (!t) throw std::invalid_argument("cell '" + c.to_string() + "' never enters the trajectory");
    tau.push_back(*t);
  }
  out.rho = *std::max_element(tau.begin(), tau.end());
  out.steps = tr.size() - out.rho;
  const std::size_t d = cells.size();
  out.values.assign(out.steps * d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t shift = out.rho - tau[j];
    const IncrementProcess y = extract_increments(tr, cells[j], out.steps + shift);
    for (std::size_t n = 0; n < out.steps; ++n) out.values[n * d + j] = y.values[n + shift];
  }
  return out;
}

}  // namespace treelimit
