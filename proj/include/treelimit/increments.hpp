#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "treelimit/growth.hpp"
#include "treelimit/measures.hpp"
#include "treelimit/rng.hpp"
#include "treelimit/word.hpp"

namespace treelimit {

/// Y(u): for n = 1, 2, ..., +1 if step tau_u + n inserts into the right
/// subtree of u, -1 for the left subtree, 0 otherwise.
struct IncrementProcess {
  Word node;
  std::size_t origin = 0;  // tau_u
  std::vector<std::int8_t> values;
};

inline constexpr std::size_t kDefaultHorizon = 10'000;

/// Throws std::invalid_argument if u never enters the trajectory.
IncrementProcess extract_increments(const Trajectory& tr, const Word& u,
                                    std::size_t horizon = kDefaultHorizon);

/// Probabilities of (-1, 0, +1).
using Pmf3 = std::array<double, 3>;

/// (mu(B_{u0}), 1 - mu(B_{u0}) - mu(B_{u1}), mu(B_{u1})); requires mu(B_u) > 0.
Pmf3 increment_pmf(const DyadicMeasure& mu, const Word& u);

/// Relative frequencies of -1, 0, +1; throws on an empty process.
Pmf3 empirical_pmf(const IncrementProcess& y);
Pmf3 empirical_pmf(std::span<const std::int8_t> values);

/// s(tau_u + n, u) = 1 + #{j <= n : Y_j(u) != 0}, the subtree size at u
/// rebuilt from the increments.
std::size_t reconstruct_subtree_size(const IncrementProcess& y, std::size_t n);

struct ExchangeabilityReport {
  std::size_t block_len = 0;
  std::size_t blocks = 0;
  std::size_t shuffles = 0;
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Permutation diagnostic: counts length-`block_len` patterns over
/// non-overlapping blocks, measures their chi-square distance to the
/// expectation under a uniform rearrangement of the same multiset, and
/// ranks the observed distance among `num_shuffles` random rearrangements.
/// Exchangeable input gives a valid (super-uniform) p-value.
ExchangeabilityReport exchangeability_statistic(std::span<const std::int8_t> values,
                                                std::size_t block_len, std::size_t num_shuffles,
                                                Rng& rng);

/// True iff `cells` is the boundary of some nonempty tree (a complete
/// prefix code with at least two words).
bool is_boundary_partition(std::span<const Word> cells);

/// d-dimensional combined process Y0, row-major: entry (n, j) is
/// Y_{n + rho - tau_j}(u_j) with rho = max_j tau_j. Each row has exactly
/// one nonzero entry, equal to +1 or -1.
struct CombinedProcess {
  std::vector<Word> cells;
  std::size_t rho = 0;
  std::size_t steps = 0;
  std::vector<std::int8_t> values;

  std::int8_t at(std::size_t n, std::size_t j) const { return values[n * cells.size() + j]; }
};

CombinedProcess combine_partition_process(const Trajectory& tr, std::span<const Word> cells);

}  // namespace treelimit
