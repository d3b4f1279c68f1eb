#include "treelimit/experiment.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "treelimit/growth.hpp"
#include "treelimit/io.hpp"
#include "treelimit/parallel.hpp"

namespace treelimit::experiment {

namespace {

using nlohmann::json;

constexpr std::pair<Kind, const char*> kKindNames[] = {
    {Kind::grow, "grow"},         {Kind::uniform, "uniform"},
    {Kind::clt, "clt"},           {Kind::bst_mixture, "bst-mixture"},
    {Kind::increments, "increments"}, {Kind::trace, "trace"},
    {Kind::embed, "embed"},       {Kind::selftest, "selftest"},
};

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json words_json(std::span<const Word> words) {
  json out = json::array();
  for (const auto& w : words) out.push_back(w.to_string());
  return out;
}

json pmf_json(const Pmf3& p) { return json::array({p[0], p[1], p[2]}); }

std::string pass_word(bool ok) { return ok ? "PASS" : "FAIL"; }

std::vector<Word> nodes_of(const Config& c) {
  try {
    auto nodes = io::parse_node_list(c.nodes);
    if (nodes.empty()) throw UsageError("empty node list");
    return nodes;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("--nodes: " + std::string(e.what()));
  }
}

Measure measure_of(const Config& c) {
  try {
    return io::parse_measure(c.measure);
  } catch (const std::exception& e) {
    throw UsageError("--measure " + c.measure + ": " + e.what());
  }
}

std::string model_tag(const Config& c) {
  return c.model == "dst" ? "dst:" + c.measure : c.model;
}

Trajectory grow_model(const Config& c, Rng& rng) {
  Trajectory tr;
  if (c.model == "dst") {
    tr = dst_grow(measure_of(c), c.n, rng);
  } else if (c.model == "bst") {
    tr = bst_grow(c.n, rng);
  } else if (c.model == "remy") {
    tr = remy_grow(c.n, rng);
  } else {
    throw UsageError("model '" + c.model + "' does not produce a nested sequence");
  }
  BinaryTree x = tr.tree();
  return Trajectory(std::move(x), model_tag(c), c.seed);
}

Outcome run_grow(const Config& c) {
  Rng rng(c.seed);
  const Trajectory tr = grow_model(c, rng);
  std::ostringstream text;
  io::write_trajectory(text, tr);
  Outcome out;
  out.primary = text.str();
  out.summary = "grow: " + tr.model() + " n=" + std::to_string(tr.size()) +
                " height=" + std::to_string(tr.tree().height());
  return out;
}

Outcome run_uniform(const Config& c) {
  Rng rng(c.seed);
  BinaryTree x;
  if (c.model == "remy") {
    x = remy_grow(c.n, rng).tree();
  } else {
    x = uniform_tree(c.n, rng);
  }
  Outcome out;
  if (c.format == "json") {
    out.primary = io::tree_to_json(x).dump() + "\n";
  } else {
    std::ostringstream text;
    io::write_tree_lines(text, x);
    out.primary = text.str();
  }
  out.summary = "uniform: n=" + std::to_string(x.size()) + " height=" + std::to_string(x.height());
  return out;
}

Outcome covariance_outcome(const CovarianceReport& report, json body, const std::string& label) {
  Outcome out;
  out.primary = body.dump(2) + "\n";
  out.csv = covariance_csv(report);
  std::size_t passes = 0;
  for (const auto& e : report.entries) passes += e.pass ? 1 : 0;
  out.summary = label + ": " + std::to_string(passes) + "/" + std::to_string(report.entries.size()) +
                " covariance entries within " + io::format_double(report.se_multiplier) + " SE";
  if (report.low_power) {
    out.summary += ", low power (reps < " + std::to_string(kLowPowerReps) + "), not gated";
    out.status = kExitPass;
  } else {
    out.status = report.passed ? kExitPass : kExitFail;
    out.summary += ", " + pass_word(report.passed);
  }
  return out;
}

Outcome run_clt(const Config& c) {
  const auto nodes = nodes_of(c);
  const Measure mu = measure_of(c);
  CovarianceReport report;
  try {
    report = clt_experiment(mu, nodes, {c.n, c.reps, c.seed, c.workers});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json body = to_json(report);
  body["experiment"] = "clt";
  return covariance_outcome(report, std::move(body), "clt");
}

Outcome run_bst_mixture(const Config& c) {
  const auto nodes = nodes_of(c);
  BstMixtureOptions options;
  options.clt = {c.n, c.reps, c.seed, c.workers};
  options.shape_size = c.shape_size;
  options.shape_runs = c.shape_runs;
  const BstMixtureReport report = bst_mixture_experiment(nodes, options);
  json body = {{"experiment", "bst-mixture"},
               {"conditional", to_json(report.conditional)},
               {"shapes", to_json(report.shapes)},
               {"passed", report.passed}};
  Outcome out = covariance_outcome(report.conditional, body, "bst-mixture");
  out.summary += "; shape law p=" + io::format_double(report.shapes.test.p_value) + " " +
                 pass_word(report.shapes.passed);
  const bool gated_ok = report.conditional.low_power || report.conditional.passed;
  out.status = gated_ok && report.shapes.passed ? kExitPass : kExitFail;
  return out;
}

Outcome run_increments(const Config& c) {
  const auto nodes = nodes_of(c);
  const Measure mu = measure_of(c);
  IncrementsOptions options{c.horizon, c.reps, c.block_len, c.shuffles, c.seed, c.workers};
  IncrementsStudy study;
  try {
    study = increments_study(mu, nodes, options);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json reports = json::array();
  for (const auto& node : study.nodes) {
    reports.push_back({{"node", node.node.to_string()},
                       {"horizon", study.options.horizon},
                       {"pmf_expected", pmf_json(node.expected)},
                       {"pmf_observed", pmf_json(node.observed)},
                       {"p_value", node.p_values.front()},
                       {"p_values", node.p_values},
                       {"observations", node.observations},
                       {"pmf_within_band", node.pmf_within_band},
                       {"exchangeable_fraction", node.exchangeable_fraction},
                       {"reconstruction_exact", node.reconstruction_exact}});
  }
  json body = {{"experiment", "increments"},
               {"measure", study.measure},
               {"reps", study.options.reps},
               {"seed", study.options.seed},
               {"block_len", study.options.block_len},
               {"shuffles", study.options.shuffles},
               {"level", study.level},
               {"nodes", reports},
               {"passed", study.passed}};
  Outcome out;
  out.primary = body.dump(2) + "\n";
  std::ostringstream csv;
  const std::string header[] = {"node", "step", "value"};
  io::write_csv_row(csv, header);
  for (const auto& y : study.first_run) {
    for (std::size_t i = 0; i < y.values.size(); ++i) {
      const std::string row[] = {io::csv_word(y.node), std::to_string(i + 1),
                                 std::to_string(static_cast<int>(y.values[i]))};
      io::write_csv_row(csv, row);
    }
  }
  out.csv = csv.str();
  out.status = study.passed ? kExitPass : kExitFail;
  out.summary = "increments: " + std::to_string(study.nodes.size()) + " nodes, " +
                std::to_string(study.options.reps) + " runs, " + pass_word(study.passed);
  return out;
}

Outcome run_trace(const Config& c) {
  const auto nodes = nodes_of(c);
  GrowthModel model;
  if (c.model == "dst") {
    model.kind = ModelKind::dst;
    model.measure = measure_of(c);
  } else if (c.model == "bst") {
    model.kind = ModelKind::bst;
  } else if (c.model == "remy") {
    model.kind = ModelKind::remy;
  } else {
    model.kind = ModelKind::catalan_direct;
  }
  std::vector<std::size_t> checkpoints = c.checkpoints;
  if (checkpoints.empty()) {
    for (std::size_t k = 1; k < c.n; k *= 10) checkpoints.push_back(k);
    checkpoints.push_back(c.n);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  std::ostringstream csv;
  const std::string header[] = {"node", "n", "t", "embedded", "gap", "within_bounds"};
  io::write_csv_row(csv, header);
  bool ok = true;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Rng rng(derive_seed(c.seed, i));
    const auto trace = convergence_trace(model, nodes[i], checkpoints, rng);
    for (const auto& p : trace) {
      const double gap = p.embedded - p.t;
      const bool within = gap >= -1e-12 && gap <= 1.0 / static_cast<double>(p.n + 1) + 1e-12;
      ok = ok && within;
      const std::string row[] = {io::csv_word(nodes[i]), std::to_string(p.n), io::format_double(p.t),
                                 io::format_double(p.embedded), io::format_double(gap),
                                 within ? "true" : "false"};
      io::write_csv_row(csv, row);
    }
  }
  Outcome out;
  out.primary = csv.str();
  out.status = ok ? kExitPass : kExitFail;
  out.summary = "trace: " + model.tag() + ", " + std::to_string(checkpoints.size()) +
                " checkpoints, embedding bounds " + pass_word(ok);
  return out;
}

Outcome run_embed(const Config& c) {
  BinaryTree x;
  if (!c.tree.empty()) {
    try {
      x = io::load_tree(c.tree);
    } catch (const std::exception& e) {
      throw UsageError("--tree " + c.tree + ": " + e.what());
    }
  } else {
    Rng rng(c.seed);
    x = c.model == "catalan" ? uniform_tree(c.n, rng) : grow_model(c, rng).tree();
  }
  if (x.empty()) throw UsageError("cannot embed the empty tree");
  const Measure mu = boundary_measure(x);

  bool exact = true;
  const auto n = static_cast<std::int64_t>(x.size());
  auto check = [&](const Word& u) {
    const auto m = boundary_mass_exact(x, u);
    const Rational want(1 + static_cast<std::int64_t>(x.subtree_size(u)), n + 1);
    exact = exact && m && *m == want;
  };
  for (const auto& u : x.words()) check(u);
  for (const auto& u : x.boundary()) check(u);

  std::ostringstream csv;
  io::write_cylinder_csv(csv, *mu, c.depth);
  Outcome out;
  out.primary = csv.str();
  if (!c.table_out.empty()) out.csv = io::measure_table_json(*mu, c.depth).dump(2) + "\n";
  out.status = exact ? kExitPass : kExitFail;
  out.summary = "embed: |x|=" + std::to_string(x.size()) + ", depth " + std::to_string(c.depth) +
                ", boundary identity " + pass_word(exact);
  return out;
}

Outcome run_selftest(const Config& c) {
  Measure fixture;
  if (!c.fixture.empty()) {
    try {
      fixture = io::table_from_json_unchecked(io::read_json(c.fixture));
    } catch (const std::exception& e) {
      throw UsageError("--fixture " + c.fixture + ": " + e.what());
    }
  }
  const SelftestReport report = selftest(c.seed, fixture);
  json checks = json::array();
  std::size_t passes = 0;
  for (const auto& ch : report.checks) {
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    passes += ch.passed ? 1 : 0;
  }
  Outcome out;
  out.primary = json{{"experiment", "selftest"}, {"checks", checks}, {"passed", report.passed}}.dump(2) + "\n";
  out.status = report.passed ? kExitPass : kExitFail;
  out.summary = "selftest: " + std::to_string(passes) + "/" + std::to_string(report.checks.size()) +
                " checks, " + pass_word(report.passed);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

Trajectory grow_until_entered(const Measure& mu, std::span<const Word> nodes, std::size_t horizon,
                              Rng& rng) {
  BinaryTree x = BinaryTree::singleton();
  DstGrower grower(mu);
  std::size_t pending = 0;
  for (const auto& u : nodes) pending += x.contains(u) ? 0 : 1;
  while (pending > 0) {
    const NodeId id = grower.step(x, rng);
    for (const auto& u : nodes) {
      if (u.size() == x.depth(id) && x.find(u) == id) --pending;
    }
  }
  grower.grow_to(x, x.size() + horizon, rng);
  return Trajectory(std::move(x), "dst", 0);
}

bool reconstruction_holds(const Trajectory& tr, const IncrementProcess& y) {
  const BinaryTree& x = tr.tree();
  std::size_t size = 1;
  for (std::size_t n = 1; n <= y.values.size(); ++n) {
    const NodeId id = static_cast<NodeId>(y.origin + n - 1);
    if (is_prefix(y.node, x.word_of(id))) ++size;
    if (reconstruct_subtree_size(y, n) != size) return false;
  }
  return true;
}

}  // namespace

std::string to_string(Kind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

Kind parse_kind(std::string_view name) {
  for (const auto& [k, text] : kKindNames) {
    if (name == text) return k;
  }
  throw UsageError("unknown experiment kind '" + std::string(name) + "'");
}

void validate(const Config& c) {
  const bool needs_n = c.kind != Kind::selftest && !(c.kind == Kind::embed && !c.tree.empty());
  if (needs_n && c.n < 1) throw UsageError("--n must be at least 1");
  if ((c.kind == Kind::clt || c.kind == Kind::bst_mixture || c.kind == Kind::increments) && c.reps < 1) {
    throw UsageError("--reps must be at least 1");
  }
  if ((c.kind == Kind::clt || c.kind == Kind::bst_mixture) && c.reps < 2) {
    throw UsageError("--reps must be at least 2 for a covariance estimate");
  }
  static const char* models[] = {"dst", "bst", "remy", "catalan"};
  if (std::find(std::begin(models), std::end(models), c.model) == std::end(models)) {
    throw UsageError("unknown model '" + c.model + "'");
  }
  if (c.format != "lines" && c.format != "json") throw UsageError("unknown format '" + c.format + "'");
  if (c.depth > kMaxCylinderDepth) {
    throw UsageError("--depth above " + std::to_string(kMaxCylinderDepth));
  }
  if (c.block_len < 1 || c.block_len > 8) throw UsageError("--block-len must be in 1..8");
  if (c.horizon < 1) throw UsageError("--horizon must be at least 1");
  if (c.shape_size < 1 || c.shape_size > 8) throw UsageError("--shape-size must be in 1..8");
  if (c.kind == Kind::bst_mixture && c.shape_runs < 1) throw UsageError("--shape-runs must be at least 1");
  for (auto k : c.checkpoints) {
    if (k < 1) throw UsageError("checkpoints must be positive");
  }
  if (c.kind != Kind::selftest && c.kind != Kind::embed) {
    if (c.kind != Kind::grow && c.kind != Kind::uniform) nodes_of(c);
    if (c.model == "dst" || c.kind == Kind::clt || c.kind == Kind::increments) measure_of(c);
  }
}

Outcome execute(const Config& config) {
  validate(config);
  switch (config.kind) {
    case Kind::grow: return run_grow(config);
    case Kind::uniform: return run_uniform(config);
    case Kind::clt: return run_clt(config);
    case Kind::bst_mixture: return run_bst_mixture(config);
    case Kind::increments: return run_increments(config);
    case Kind::trace: return run_trace(config);
    case Kind::embed: return run_embed(config);
    case Kind::selftest: return run_selftest(config);
  }
  throw UsageError("unknown experiment kind");
}

int run(const Config& config, std::ostream& out, std::ostream& log) {
  const Outcome outcome = execute(config);
  if (config.output.empty() || config.output == "-") {
    out << outcome.primary;
  } else {
    write_file(config.output, outcome.primary);
  }
  if (config.kind == Kind::embed) {
    if (!config.table_out.empty()) write_file(config.table_out, outcome.csv);
  } else if (!config.csv.empty() && !outcome.csv.empty()) {
    write_file(config.csv, outcome.csv);
  }
  log << outcome.summary << '\n';
  return outcome.status;
}

IncrementsStudy increments_study(const Measure& mu, std::span<const Word> nodes,
                                 const IncrementsOptions& options) {
  if (nodes.empty()) throw std::invalid_argument("empty node list");
  if (options.reps < 1) throw std::invalid_argument("at least one replicate is required");
  for (const auto& u : nodes) {
    if (!positive_on_path(*mu, u)) {
      throw std::invalid_argument("node '" + u.to_string() + "' has zero mass under " + mu->describe());
    }
  }
  IncrementsStudy study;
  study.options = options;
  study.measure = mu->describe();

  struct RunResult {
    std::vector<std::array<std::uint64_t, 3>> counts;
    std::vector<double> p_values;
    std::vector<bool> reconstructed;
  };
  std::vector<RunResult> runs(options.reps);
  parallel_for(options.reps, options.workers, [&](std::size_t r) {
    Rng rng(derive_seed(options.seed, r));
    const Trajectory tr = grow_until_entered(mu, nodes, options.horizon, rng);
    RunResult& out = runs[r];
    std::vector<IncrementProcess> processes;
    for (const auto& u : nodes) {
      IncrementProcess y = extract_increments(tr, u, options.horizon);
      std::array<std::uint64_t, 3> counts{};
      for (auto v : y.values) ++counts[static_cast<std::size_t>(v + 1)];
      out.counts.push_back(counts);
      out.p_values.push_back(
          exchangeability_statistic(y.values, options.block_len, options.shuffles, rng).p_value);
      out.reconstructed.push_back(reconstruction_holds(tr, y));
      if (r == 0) processes.push_back(std::move(y));
    }
    if (r == 0) study.first_run = std::move(processes);
  });

  study.passed = true;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    NodeIncrements node;
    node.node = nodes[j];
    node.expected = increment_pmf(*mu, nodes[j]);
    node.reconstruction_exact = true;
    std::size_t exchangeable = 0;
    for (const auto& run : runs) {
      for (std::size_t k = 0; k < 3; ++k) node.counts[k] += run.counts[j][k];
      node.p_values.push_back(run.p_values[j]);
      exchangeable += run.p_values[j] > study.level ? 1 : 0;
      node.reconstruction_exact = node.reconstruction_exact && run.reconstructed[j];
    }
    node.observations = static_cast<std::size_t>(node.counts[0] + node.counts[1] + node.counts[2]);
    const auto total = static_cast<double>(node.observations);
    node.pmf_within_band = node.observations > 0;
    for (std::size_t k = 0; k < 3; ++k) {
      node.observed[k] = total > 0 ? static_cast<double>(node.counts[k]) / total : 0.0;
      const double p = node.expected[k];
      const double band = study.band_sigmas * std::sqrt(p * (1.0 - p) / total);
      node.pmf_within_band = node.pmf_within_band && std::abs(node.observed[k] - p) <= band + 1e-12;
    }
    node.exchangeable_fraction =
        static_cast<double>(exchangeable) / static_cast<double>(options.reps);
    study.passed = study.passed && node.pmf_within_band && node.reconstruction_exact &&
                   node.exchangeable_fraction >= study.required_fraction;
    study.nodes.push_back(std::move(node));
  }
  return study;
}

json to_json(const CovarianceReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"u", e.u.to_string()},
                       {"v", e.v.to_string()},
                       {"theoretical", e.theoretical},
                       {"empirical", e.empirical},
                       {"se", e.se},
                       {"pass", e.pass}});
  }
  json marginals = json::array();
  for (std::size_t j = 0; j < r.marginals.size(); ++j) {
    const auto& m = r.marginals[j];
    marginals.push_back({{"node", r.nodes[j].to_string()},
                         {"mean", m.mean},
                         {"variance", m.variance},
                         {"skewness", m.skewness},
                         {"excess_kurtosis", m.excess_kurtosis}});
  }
  return {{"measure", r.measure},
          {"nodes", words_json(r.nodes)},
          {"n", r.n},
          {"reps", r.reps},
          {"seed", r.seed},
          {"theoretical", matrix_json(r.theoretical)},
          {"empirical", matrix_json(r.empirical)},
          {"se", matrix_json(r.se)},
          {"entries", entries},
          {"marginals", marginals},
          {"theoretical_min_eigenvalue", r.theoretical_min_eigenvalue},
          {"se_multiplier", r.se_multiplier},
          {"required_fraction", r.required_fraction},
          {"pass_fraction", r.pass_fraction},
          {"low_power", r.low_power},
          {"passed", r.passed}};
}

json to_json(const ShapeLawComparison& s) {
  json classes = json::array();
  for (std::size_t i = 0; i < s.shapes.size(); ++i) {
    classes.push_back(
        {{"shape", s.shapes[i]}, {"bst", s.bst_counts[i]}, {"mixture", s.mixture_counts[i]}});
  }
  return {{"k", s.k},
          {"runs", s.runs},
          {"classes", classes},
          {"statistic", s.test.statistic},
          {"degrees_of_freedom", s.test.degrees_of_freedom},
          {"p_value", s.test.p_value},
          {"level", s.level},
          {"passed", s.passed}};
}

std::string covariance_csv(const CovarianceReport& report) {
  std::ostringstream csv;
  const std::string header[] = {"u", "v", "theoretical", "empirical", "se", "pass"};
  io::write_csv_row(csv, header);
  for (const auto& e : report.entries) {
    const std::string row[] = {io::csv_word(e.u),          io::csv_word(e.v),
                               io::format_double(e.theoretical), io::format_double(e.empirical),
                               io::format_double(e.se),    e.pass ? "true" : "false"};
    io::write_csv_row(csv, row);
  }
  return csv.str();
}

SelftestReport selftest(std::uint64_t seed, const Measure& fixture) {
  SelftestReport report;
  Rng rng(seed);
  auto add = [&](std::string name, bool ok, std::string detail) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  std::vector<BinaryTree> trees;
  for (std::size_t i = 0; i < 150; ++i) {
    const std::size_t n = 1 + rng.below(200);
    switch (i % 3) {
      case 0: trees.push_back(uniform_tree(n, rng)); break;
      case 1: trees.push_back(dst_grow(uniform_measure(), n, rng).tree()); break;
      default: trees.push_back(bst_grow(n, rng).tree()); break;
    }
  }

  bool cardinality = true;
  bool counts = true;
  for (const auto& x : trees) {
    cardinality = cardinality && x.boundary().size() == x.size() + 1;
    for (NodeId id = 0; id < x.size(); ++id) {
      counts = counts && x.count(id) == 1 + x.count(x.child(id, false)) + x.count(x.child(id, true));
    }
  }
  add("boundary cardinality", cardinality, "|dx| = |x|+1 on " + std::to_string(trees.size()) + " trees");
  add("count additivity", counts, "count(u) = 1 + count(u0) + count(u1)");

  bool identity = true;
  bool bounds = true;
  for (const auto& x : trees) {
    const auto n = static_cast<std::int64_t>(x.size());
    std::vector<Word> probes = x.words();
    const auto boundary = x.boundary();
    probes.insert(probes.end(), boundary.begin(), boundary.end());
    for (const auto& u : probes) {
      const Rational t = x.relative_size(u).exact();
      const auto mass = boundary_mass_exact(x, u);
      identity = identity && mass && *mass == (Rational(1) + Rational(n) * t) / Rational(n + 1);
    }
    for (std::size_t k = 0; k < 20; ++k) {
      Word u;
      const std::size_t len = rng.below(x.height() + 4);
      for (std::size_t b = 0; b < len; ++b) u.push_back(rng.fair_bit());
      const auto mass = boundary_mass_exact(x, u);
      if (!mass) continue;
      // Denominators reach (|x|+1) 2^40 |x|, past what int64 cross products hold.
      using Big = boost::multiprecision::cpp_rational;
      const Rational t = x.relative_size(u).exact();
      const Big gap = Big(mass->numerator()) / Big(mass->denominator()) -
                      Big(t.numerator()) / Big(t.denominator());
      bounds = bounds && gap >= 0 && gap <= Big(1) / Big(n + 1);
    }
  }
  add("boundary measure identity", identity, "mu_x(B_u) = (1+|x|t)/(1+|x|) on x and its boundary");
  add("boundary measure bounds", bounds, "0 <= mu_x(B_u) - t(x,u) <= 1/(1+|x|)");

  bool complete = true;
  for (std::size_t h = 0; h <= 10; ++h) {
    const BinaryTree x = complete_tree(h);
    for (std::size_t k = 0; k <= h; ++k) {
      Word u;
      for (std::size_t b = 0; b < k; ++b) u.push_back(rng.fair_bit());
      const auto want = Rational((std::int64_t{1} << (h - k + 1)) - 1, (std::int64_t{1} << (h + 1)) - 1);
      complete = complete && x.relative_size(u).exact() == want;
    }
  }
  add("complete trees", complete, "t = (2^(h-k+1)-1)/(2^(h+1)-1) for h <= 10");

  std::vector<std::pair<std::string, Measure>> measures = {
      {"uniform", uniform_measure()},
      {"bernoulli:0.3", bernoulli_measure(0.3)},
      {"point:0", point_mass(Word::parse("0"))},
      {"point:011", point_mass(Word::parse("011"))},
      {"boundary", boundary_measure(trees.front())},
      {"bst-limit", sample_bst_limit(rng)},
      {"table", table_measure(6, cylinder_masses(*bernoulli_measure(0.7), 6))},
  };
  if (fixture) measures.emplace_back("fixture", fixture);
  for (const auto& [name, mu] : measures) {
    const auto a = check_additivity(*mu, 12, 1e-10);
    add("additivity " + name, a.passed, "max defect " + io::format_double(a.max_defect));
  }

  bool normalized = true;
  double worst = 0.0;
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto all = enumerate_trajectories(k);
    for (const auto& mu : {uniform_measure(), bernoulli_measure(0.3)}) {
      double total = 0.0;
      for (const auto& tr : all) total += trajectory_probability(*mu, tr).probability;
      worst = std::max(worst, std::abs(total - 1.0));
      normalized = normalized && std::abs(total - 1.0) <= 1e-12;
    }
  }
  add("trajectory normalization", normalized, "max |sum - 1| " + io::format_double(worst));

  report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const Check& ch) { return ch.passed; });
  return report;
}

}  // namespace treelimit::experiment
