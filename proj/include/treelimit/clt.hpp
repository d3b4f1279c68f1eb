#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "treelimit/binary_tree.hpp"
#include "treelimit/growth.hpp"
#include "treelimit/measures.hpp"
#include "treelimit/rng.hpp"
#include "treelimit/stats.hpp"

namespace treelimit {

/// Z_n restricted to a node list: sqrt(n) (t(X_n,u) - mu(B_u)).
struct FluctuationVector {
  std::vector<Word> nodes;
  std::vector<double> values;
  std::size_t n = 0;
  std::string measure;
};

FluctuationVector z_statistic(const BinaryTree& x, const DyadicMeasure& mu,
                              std::span<const Word> nodes);

/// Limit covariance of (Z_u, Z_v) under DST(mu).
double theoretical_cov(const DyadicMeasure& mu, const Word& u, const Word& v);
Eigen::MatrixXd theoretical_cov_matrix(const DyadicMeasure& mu, std::span<const Word> nodes);

/// Unbiased sample covariance; rows of `data` are replicates.
Eigen::MatrixXd empirical_cov(const Eigen::MatrixXd& data);
/// Throws std::invalid_argument on fewer than two samples or mismatched
/// node lists or sizes.
Eigen::MatrixXd empirical_cov(std::span<const FluctuationVector> samples);

/// Delete-one jackknife standard error of every entry of the unbiased
/// sample covariance. NaN entries when there are fewer than three rows.
Eigen::MatrixXd jackknife_cov_se(const Eigen::MatrixXd& data);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

struct CovarianceEntry {
  Word u;
  Word v;
  double theoretical = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  bool pass = false;
};

/// Entries pass when |empirical - theoretical| <= se_multiplier * se; the
/// report passes when at least `required_fraction` of the upper-triangle
/// entries do.
struct CovarianceReport {
  std::string measure;
  std::vector<Word> nodes;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd theoretical;
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd se;
  std::vector<CovarianceEntry> entries;
  std::vector<stats::Moments> marginals;
  double theoretical_min_eigenvalue = 0.0;
  double se_multiplier = 5.0;
  double required_fraction = 0.95;
  double pass_fraction = 0.0;
  bool low_power = false;
  bool passed = false;
};

inline constexpr std::size_t kLowPowerReps = 30;

struct CltOptions {
  std::size_t n = 10'000;
  std::size_t reps = 10'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Builds the entry table and verdicts from replicate data (rows) against a
/// theoretical matrix.
CovarianceReport compare_covariance(std::span<const Word> nodes, const Eigen::MatrixXd& theoretical,
                                    const Eigen::MatrixXd& data);

/// Draws the driving measure of one replicate.
using MeasureSampler = std::function<Measure(Rng&)>;

/// Replicate r: mu_r = sampler(rng_r), grow DST(mu_r) to size n, record
/// Z_n against mu_r. The empirical covariance is compared with the mean of
/// the per-replicate limit covariances. Output does not depend on `workers`.
CovarianceReport mixed_clt_experiment(const MeasureSampler& sampler, std::span<const Word> nodes,
                                      const CltOptions& options);

/// Fixed-measure CLT check. Throws std::invalid_argument if some node of
/// `nodes` or one of its prefixes has zero mass.
CovarianceReport clt_experiment(const Measure& mu, std::span<const Word> nodes,
                                const CltOptions& options);

/// Law of X_k under plain BST against "draw M_BST, then DST(M)".
struct ShapeLawComparison {
  std::size_t k = 0;
  std::size_t runs = 0;
  std::vector<std::string> shapes;
  std::vector<std::uint64_t> bst_counts;
  std::vector<std::uint64_t> mixture_counts;
  stats::ChiSquareResult test;
  double level = 0.01;
  bool passed = false;
};

ShapeLawComparison compare_shape_laws(std::size_t k, std::size_t runs, std::uint64_t seed,
                                      unsigned workers = 1);

struct BstMixtureOptions {
  CltOptions clt;
  std::size_t shape_size = 3;
  std::size_t shape_runs = 100'000;
};

struct BstMixtureReport {
  CovarianceReport conditional;
  ShapeLawComparison shapes;
  bool passed = false;
};

BstMixtureReport bst_mixture_experiment(std::span<const Word> nodes, const BstMixtureOptions& options);

enum class ModelKind { dst, bst, remy, catalan_direct };

struct GrowthModel {
  ModelKind kind = ModelKind::dst;
  Measure measure;  // dst only

  std::string tag() const;
};

struct TracePoint {
  std::size_t n = 0;
  double t = 0.0;
  double embedded = 0.0;  // mu_{X_n}(B_u)
};

/// t(X_n,u) and mu_{X_n}(B_u) along one growth at increasing checkpoints.
/// catalan_direct has no nested sequence: each checkpoint is a fresh
/// uniform tree.
std::vector<TracePoint> convergence_trace(const GrowthModel& model, const Word& u,
                                          std::span<const std::size_t> checkpoints, Rng& rng);

}  // namespace treelimit
