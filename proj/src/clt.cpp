#include "treelimit/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "treelimit/parallel.hpp"

namespace treelimit {

FluctuationVector z_statistic(const BinaryTree& x, const DyadicMeasure& mu,
                              std::span<const Word> nodes) {
  if (x.empty()) throw std::invalid_argument("z_statistic of the empty tree");
  FluctuationVector z;
  z.nodes.assign(nodes.begin(), nodes.end());
  z.n = x.size();
  z.measure = mu.describe();
  const double root_n = std::sqrt(static_cast<double>(x.size()));
  z.values.reserve(nodes.size());
  for (const auto& u : nodes) z.values.push_back(root_n * (x.t(u) - mu.mass(u)));
  return z;
}

double theoretical_cov(const DyadicMeasure& mu, const Word& u, const Word& v) {
  const double mu_u = mu.mass(u);
  const double mu_v = mu.mass(v);
  if (u == v) return mu_u * (1.0 - mu_u);
  if (is_prefix(u, v)) return mu_v * (1.0 - mu_u);
  if (is_prefix(v, u)) return mu_u * (1.0 - mu_v);
  return -mu_u * mu_v;
}

Eigen::MatrixXd theoretical_cov_matrix(const DyadicMeasure& mu, std::span<const Word> nodes) {
  const auto d = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      m(i, j) = m(j, i) = theoretical_cov(mu, nodes[static_cast<std::size_t>(i)],
                                          nodes[static_cast<std::size_t>(j)]);
    }
  }
  return m;
}

Eigen::MatrixXd empirical_cov(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw std::invalid_argument("empirical covariance needs at least two samples");
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(data.rows() - 1);
}

Eigen::MatrixXd empirical_cov(std::span<const FluctuationVector> samples) {
  if (samples.size() < 2) throw std::invalid_argument("empirical covariance needs at least two samples");
  const auto& first = samples.front();
  Eigen::MatrixXd data(static_cast<Eigen::Index>(samples.size()),
                       static_cast<Eigen::Index>(first.nodes.size()));
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (samples[r].nodes != first.nodes || samples[r].n != first.n) {
      throw std::invalid_argument("fluctuation samples disagree on node set or tree size");
    }
    for (std::size_t j = 0; j < first.nodes.size(); ++j) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = samples[r].values[j];
    }
  }
  return empirical_cov(data);
}

Eigen::MatrixXd jackknife_cov_se(const Eigen::MatrixXd& data) {
  const Eigen::Index rows = data.rows();
  const Eigen::Index d = data.cols();
  Eigen::MatrixXd se = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::quiet_NaN());
  if (rows < 3) return se;
  const Eigen::MatrixXd x = data.rowwise() - data.colwise().mean();
  const Eigen::VectorXd sums = x.colwise().sum().transpose();
  const Eigen::MatrixXd cross = x.transpose() * x;
  const auto r = static_cast<double>(rows);
  std::vector<double> loo(static_cast<std::size_t>(rows));
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      double mean = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double sa = sums(a) - x(i, a);
        const double sb = sums(b) - x(i, b);
        const double sab = cross(a, b) - x(i, a) * x(i, b);
        loo[static_cast<std::size_t>(i)] = (sab - sa * sb / (r - 1.0)) / (r - 2.0);
        mean += loo[static_cast<std::size_t>(i)];
      }
      mean /= r;
      double ss = 0.0;
      for (double c : loo) ss += (c - mean) * (c - mean);
      se(a, b) = se(b, a) = std::sqrt((r - 1.0) / r * ss);
    }
  }
  return se;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

CovarianceReport compare_covariance(std::span<const Word> nodes, const Eigen::MatrixXd& theoretical,
                                    const Eigen::MatrixXd& data) {
  CovarianceReport report;
  report.nodes.assign(nodes.begin(), nodes.end());
  report.reps = static_cast<std::size_t>(data.rows());
  report.theoretical = theoretical;
  report.empirical = empirical_cov(data);
  report.se = jackknife_cov_se(data);
  report.theoretical_min_eigenvalue = min_eigenvalue(theoretical);
  report.low_power = report.reps < kLowPowerReps;

  std::size_t passes = 0;
  const auto d = static_cast<Eigen::Index>(nodes.size());
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      CovarianceEntry e;
      e.u = nodes[static_cast<std::size_t>(i)];
      e.v = nodes[static_cast<std::size_t>(j)];
      e.theoretical = theoretical(i, j);
      e.empirical = report.empirical(i, j);
      e.se = report.se(i, j);
      e.pass = std::isfinite(e.se) &&
               std::abs(e.empirical - e.theoretical) <= report.se_multiplier * e.se;
      passes += e.pass ? 1 : 0;
      report.entries.push_back(std::move(e));
    }
  }
  report.pass_fraction =
      report.entries.empty() ? 1.0
                             : static_cast<double>(passes) / static_cast<double>(report.entries.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<double> column(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index r = 0; r < data.rows(); ++r) column[static_cast<std::size_t>(r)] = data(r, j);
    report.marginals.push_back(stats::moments(column));
  }
  report.passed = !report.low_power && report.pass_fraction >= report.required_fraction &&
                  report.theoretical_min_eigenvalue >= -1e-9;
  return report;
}

CovarianceReport mixed_clt_experiment(const MeasureSampler& sampler, std::span<const Word> nodes,
                                      const CltOptions& options) {
  if (options.n == 0) throw std::invalid_argument("tree size must be at least 1");
  if (options.reps < 2) throw std::invalid_argument("at least two replicates are required");
  if (nodes.empty()) throw std::invalid_argument("empty node list");
  const auto d = static_cast<Eigen::Index>(nodes.size());
  const auto reps = static_cast<Eigen::Index>(options.reps);
  Eigen::MatrixXd data(reps, d);
  std::vector<Eigen::MatrixXd> theo(options.reps);
  std::vector<std::string> names(options.reps);
  const double root_n = std::sqrt(static_cast<double>(options.n));

  parallel_for(options.reps, options.workers, [&](std::size_t r) {
    Rng rng(derive_seed(options.seed, r));
    const Measure mu = sampler(rng);
    BinaryTree x = BinaryTree::singleton();
    DstGrower grower(mu);
    grower.grow_to(x, options.n, rng);
    for (Eigen::Index j = 0; j < d; ++j) {
      const Word& u = nodes[static_cast<std::size_t>(j)];
      data(static_cast<Eigen::Index>(r), j) = root_n * (x.t(u) - mu->mass(u));
    }
    theo[r] = theoretical_cov_matrix(*mu, nodes);
    names[r] = mu->describe();
  });

  Eigen::MatrixXd mean_theo = Eigen::MatrixXd::Zero(d, d);
  for (const auto& m : theo) mean_theo += m;
  mean_theo /= static_cast<double>(options.reps);

  CovarianceReport report = compare_covariance(nodes, mean_theo, data);
  report.n = options.n;
  report.seed = options.seed;
  report.measure = names.front();
  return report;
}

CovarianceReport clt_experiment(const Measure& mu, std::span<const Word> nodes,
                                const CltOptions& options) {
  for (const auto& u : nodes) {
    if (!positive_on_path(*mu, u)) {
      throw std::invalid_argument("measure " + mu->describe() + " has zero mass on the path to '" +
                                  u.to_string() + "'");
    }
  }
  return mixed_clt_experiment([&mu](Rng&) { return mu; }, nodes, options);
}

ShapeLawComparison compare_shape_laws(std::size_t k, std::size_t runs, std::uint64_t seed,
                                      unsigned workers) {
  if (k == 0) throw std::invalid_argument("shape comparison needs k >= 1");
  if (runs == 0) throw std::invalid_argument("shape comparison needs runs >= 1");
  ShapeLawComparison out;
  out.k = k;
  out.runs = runs;
  std::map<std::string, std::size_t> index;
  for (const auto& tree : enumerate_trees(k)) {
    index.emplace(tree.shape_code(), out.shapes.size());
    out.shapes.push_back(tree.shape_code());
  }
  std::vector<std::uint32_t> bst_class(runs);
  std::vector<std::uint32_t> mix_class(runs);
  parallel_for(runs, workers, [&](std::size_t r) {
    {
      Rng rng(derive_seed(seed, 2 * r));
      BinaryTree x = BinaryTree::singleton();
      BstGrower().grow_to(x, k, rng);
      bst_class[r] = static_cast<std::uint32_t>(index.at(x.shape_code()));
    }
    {
      Rng rng(derive_seed(seed, 2 * r + 1));
      const Measure m = sample_bst_limit(rng);
      BinaryTree x = BinaryTree::singleton();
      DstGrower(m).grow_to(x, k, rng);
      mix_class[r] = static_cast<std::uint32_t>(index.at(x.shape_code()));
    }
  });
  out.bst_counts.assign(out.shapes.size(), 0);
  out.mixture_counts.assign(out.shapes.size(), 0);
  for (std::size_t r = 0; r < runs; ++r) {
    ++out.bst_counts[bst_class[r]];
    ++out.mixture_counts[mix_class[r]];
  }
  if (out.shapes.size() == 1) {
    out.test = {};
    out.passed = out.bst_counts[0] == runs && out.mixture_counts[0] == runs;
  } else {
    out.test = stats::chi_square_two_sample(out.bst_counts, out.mixture_counts);
    out.passed = out.test.p_value > out.level;
  }
  return out;
}

BstMixtureReport bst_mixture_experiment(std::span<const Word> nodes,
                                        const BstMixtureOptions& options) {
  BstMixtureReport report;
  report.conditional = mixed_clt_experiment(
      [](Rng& rng) { return sample_bst_limit(rng); }, nodes, options.clt);
  report.conditional.measure = "bst-limit (sampled per replicate)";
  report.shapes = compare_shape_laws(options.shape_size, options.shape_runs,
                                     splitmix64(options.clt.seed ^ 0x5bd1e995ull),
                                     options.clt.workers);
  report.passed = report.conditional.passed && report.shapes.passed;
  return report;
}

std::string GrowthModel::tag() const {
  switch (kind) {
    case ModelKind::dst: return "dst";
    case ModelKind::bst: return "bst";
    case ModelKind::remy: return "remy";
    case ModelKind::catalan_direct: return "catalan";
  }
  return "unknown";
}

std::vector<TracePoint> convergence_trace(const GrowthModel& model, const Word& u,
                                          std::span<const std::size_t> checkpoints, Rng& rng) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw std::invalid_argument("checkpoints must be increasing");
  }
  if (!checkpoints.empty() && checkpoints.front() == 0) {
    throw std::invalid_argument("checkpoints must be positive");
  }
  if (model.kind == ModelKind::dst && !model.measure) {
    throw std::invalid_argument("dst model needs a measure");
  }
  std::vector<TracePoint> out;
  out.reserve(checkpoints.size());
  auto record = [&](const BinaryTree& x) {
    out.push_back({x.size(), x.t(u), boundary_mass(x, u)});
  };

  BinaryTree x = BinaryTree::singleton();
  switch (model.kind) {
    case ModelKind::dst: {
      DstGrower grower(model.measure);
      for (auto n : checkpoints) {
        grower.grow_to(x, n, rng);
        record(x);
      }
      break;
    }
    case ModelKind::bst: {
      BstGrower grower;
      for (auto n : checkpoints) {
        grower.grow_to(x, n, rng);
        record(x);
      }
      break;
    }
    case ModelKind::remy: {
      RemyGrower grower;
      for (auto n : checkpoints) {
        grower.grow_to(x, n, rng);
        record(x);
      }
      break;
    }
    case ModelKind::catalan_direct: {
      UniformTreeSampler sampler(checkpoints.empty() ? 0 : checkpoints.back());
      for (auto n : checkpoints) record(sampler.sample(n, rng));
      break;
    }
  }
  return out;
}

}  // namespace treelimit
