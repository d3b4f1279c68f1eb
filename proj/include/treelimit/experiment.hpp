#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treelimit/clt.hpp"
#include "treelimit/increments.hpp"
#include "treelimit/measures.hpp"

namespace treelimit::experiment {

enum class Kind { grow, uniform, clt, bst_mixture, increments, trace, embed, selftest };

std::string to_string(Kind kind);
Kind parse_kind(std::string_view name);

/// Bad flags, words, probabilities or files. The CLI maps it to exit 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Everything a run depends on. Replicate r of any experiment draws from
/// Rng(derive_seed(seed, r)), so results do not depend on `workers`.
struct Config {
  Kind kind = Kind::clt;
  std::string model = "dst";  // dst | bst | remy | catalan
  std::string measure = "uniform";
  std::size_t n = 10'000;
  std::size_t reps = 10'000;
  std::string nodes = "0,1";
  std::size_t depth = 4;
  std::size_t horizon = kDefaultHorizon;
  std::size_t block_len = 2;
  std::size_t shuffles = 199;
  std::vector<std::size_t> checkpoints;
  std::size_t shape_size = 3;
  std::size_t shape_runs = 100'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string output = "-";
  std::string csv;
  std::string tree;
  std::string table_out;
  std::string format = "lines";  // lines | json
  std::string fixture;
};

/// Throws UsageError on the first invalid field.
void validate(const Config& config);

/// What a run produced, before anything is written.
struct Outcome {
  int status = kExitPass;
  std::string primary;  // JSON report or text artifact
  std::string csv;
  std::string summary;  // one line for the terminal
};

Outcome execute(const Config& config);

/// execute() plus writing: the primary artifact to config.output ("-" is
/// `out`), the CSV to config.csv when set, the summary to `log`.
int run(const Config& config, std::ostream& out, std::ostream& log);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<Check> checks;
  bool passed = false;
};

/// Exact identities at small sizes: boundary cardinality and count
/// additivity, the boundary-measure identity and bounds, complete trees,
/// measure additivity and trajectory-probability normalization. A fixture
/// table measure, when given, must pass the additivity check too.
SelftestReport selftest(std::uint64_t seed, const Measure& fixture = nullptr);

struct IncrementsOptions {
  std::size_t horizon = kDefaultHorizon;
  std::size_t reps = 1;
  std::size_t block_len = 2;
  std::size_t shuffles = 199;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct NodeIncrements {
  Word node;
  Pmf3 expected{};
  /// Pooled over replicates: counts of -1, 0, +1 and their frequencies.
  std::array<std::uint64_t, 3> counts{};
  Pmf3 observed{};
  std::size_t observations = 0;
  /// Every component within band_sigmas binomial standard deviations.
  bool pmf_within_band = false;
  /// Permutation p-value of each replicate.
  std::vector<double> p_values;
  double exchangeable_fraction = 0.0;
  /// s(tau_u + n, u) = 1 + #{nonzero Y_j, j <= n} at every n of every replicate.
  bool reconstruction_exact = false;
};

struct IncrementsStudy {
  IncrementsOptions options;
  std::string measure;
  double level = 0.01;
  double band_sigmas = 5.0;
  double required_fraction = 0.95;
  std::vector<NodeIncrements> nodes;
  /// Replicate 0, for export.
  std::vector<IncrementProcess> first_run;
  bool passed = false;
};

/// Replicate r grows DST(mu) until every node has entered, then `horizon`
/// steps more, and extracts Y(u) for each node.
IncrementsStudy increments_study(const Measure& mu, std::span<const Word> nodes,
                                 const IncrementsOptions& options);

nlohmann::json to_json(const CovarianceReport& report);
nlohmann::json to_json(const ShapeLawComparison& shapes);
std::string covariance_csv(const CovarianceReport& report);

}  // namespace treelimit::experiment
