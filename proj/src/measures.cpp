#include "treelimit/measures.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace treelimit {

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::uniform: return "uniform";
    case MeasureKind::bernoulli: return "bernoulli";
    case MeasureKind::point: return "point";
    case MeasureKind::boundary: return "boundary";
    case MeasureKind::bst_limit: return "bst-limit";
    case MeasureKind::table: return "table";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kLinearMassDepth = 64;

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Cursor that rebuilds the word and asks the measure for q at every step.
class GenericCursor final : public PathCursor {
 public:
  explicit GenericCursor(const DyadicMeasure& mu) : mu_(mu) {}
  void reset() override { path_.clear(); }
  double right_fraction() override { return mu_.right_fraction(path_); }
  void descend(bool bit) override { path_.push_back(bit); }

 private:
  const DyadicMeasure& mu_;
  Word path_;
};

/// (boundary slots below the deepest tree-or-boundary prefix of u, number
/// of bits of u below that boundary node).
std::pair<std::size_t, std::size_t> boundary_locate(const BinaryTree& x, const Word& u) {
  NodeId cur = x.root();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const NodeId nxt = x.child(cur, u[i]);
    if (nxt == kNoNode) return {1, u.size() - i - 1};
    cur = nxt;
  }
  return {x.count(cur) + 1, 0};
}

class ConstantCursor final : public PathCursor {
 public:
  explicit ConstantCursor(double q) : q_(q) {}
  void reset() override {}
  double right_fraction() override { return q_; }
  void descend(bool) override {}
  bool draw(Rng& rng) override { return rng.bernoulli(q_); }

 private:
  double q_;
};

class UniformMeasure final : public DyadicMeasure {
 public:
  MeasureKind kind() const override { return MeasureKind::uniform; }
  std::string describe() const override { return "uniform"; }
  double right_fraction(const Word&) const override { return 0.5; }
  double mass(const Word& u) const override {
    return std::ldexp(1.0, -static_cast<int>(u.size()));
  }
  double log_mass(const Word& u) const override {
    return -static_cast<double>(u.size()) * std::log(2.0);
  }
  std::optional<Rational> exact_mass(const Word& u) const override {
    if (u.size() > 62) return std::nullopt;
    return Rational(1, std::int64_t{1} << u.size());
  }
  std::unique_ptr<PathCursor> cursor() const override {
    return std::make_unique<ConstantCursor>(0.5);
  }
};

class BernoulliMeasure final : public DyadicMeasure {
 public:
  explicit BernoulliMeasure(double p) : p_(p) {}
  MeasureKind kind() const override { return MeasureKind::bernoulli; }
  std::string describe() const override { return "bernoulli:" + format_double(p_); }
  double right_fraction(const Word&) const override { return p_; }
  double mass(const Word& u) const override {
    const auto ones = static_cast<double>(u.count_ones());
    const auto zeros = static_cast<double>(u.size()) - ones;
    return std::pow(p_, ones) * std::pow(1.0 - p_, zeros);
  }
  double log_mass(const Word& u) const override {
    const auto ones = static_cast<double>(u.count_ones());
    const auto zeros = static_cast<double>(u.size()) - ones;
    return ones * std::log(p_) + zeros * std::log1p(-p_);
  }
  std::unique_ptr<PathCursor> cursor() const override {
    return std::make_unique<ConstantCursor>(p_);
  }

 private:
  double p_;
};

class PointMeasure final : public DyadicMeasure {
 public:
  explicit PointMeasure(Word pattern) : pattern_(std::move(pattern)) {}
  MeasureKind kind() const override { return MeasureKind::point; }
  std::string describe() const override { return "point:" + pattern_.to_string(); }

  bool bit(std::size_t i) const noexcept { return pattern_[i % pattern_.size()]; }
  bool on_path(const Word& u) const noexcept {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] != bit(i)) return false;
    }
    return true;
  }

  double right_fraction(const Word& u) const override {
    if (!on_path(u)) return 0.0;
    return bit(u.size()) ? 1.0 : 0.0;
  }
  double mass(const Word& u) const override { return on_path(u) ? 1.0 : 0.0; }
  double log_mass(const Word& u) const override {
    return on_path(u) ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  std::optional<Rational> exact_mass(const Word& u) const override {
    return Rational(on_path(u) ? 1 : 0);
  }

  std::unique_ptr<PathCursor> cursor() const override {
    class Cursor final : public PathCursor {
     public:
      explicit Cursor(const PointMeasure& mu) : mu_(mu) {}
      void reset() override {
        depth_ = 0;
        alive_ = true;
      }
      double right_fraction() override { return alive_ && mu_.bit(depth_) ? 1.0 : 0.0; }
      void descend(bool b) override {
        alive_ = alive_ && b == mu_.bit(depth_);
        ++depth_;
      }

     private:
      const PointMeasure& mu_;
      std::size_t depth_ = 0;
      bool alive_ = true;
    };
    return std::make_unique<Cursor>(*this);
  }

 private:
  Word pattern_;
};

class BoundaryMeasure final : public DyadicMeasure {
 public:
  explicit BoundaryMeasure(BinaryTree x) : x_(std::move(x)) {}
  MeasureKind kind() const override { return MeasureKind::boundary; }
  std::string describe() const override {
    return "boundary:" + std::to_string(x_.size()) + "-node tree";
  }

  double right_fraction(const Word& u) const override { return q_at(x_.find(u)); }

  double q_at(NodeId id) const {
    if (id == kNoNode) return 0.5;
    const double below = static_cast<double>(x_.count(id) + 1);
    return static_cast<double>(x_.count(x_.child(id, true)) + 1) / below;
  }

  double mass(const Word& u) const override { return boundary_mass(x_, u); }
  double log_mass(const Word& u) const override {
    auto [leaves, extra] = boundary_locate(x_, u);
    return std::log(static_cast<double>(leaves) / static_cast<double>(x_.size() + 1)) -
           static_cast<double>(extra) * std::log(2.0);
  }
  std::optional<Rational> exact_mass(const Word& u) const override {
    return boundary_mass_exact(x_, u);
  }

  std::unique_ptr<PathCursor> cursor() const override {
    class Cursor final : public PathCursor {
     public:
      explicit Cursor(const BoundaryMeasure& mu) : mu_(mu) { reset(); }
      void reset() override { id_ = mu_.x_.root(); }
      double right_fraction() override { return mu_.q_at(id_); }
      void descend(bool b) override {
        if (id_ != kNoNode) id_ = mu_.x_.child(id_, b);
      }

     private:
      const BoundaryMeasure& mu_;
      NodeId id_ = kNoNode;
    };
    return std::make_unique<Cursor>(*this);
  }

 private:
  BinaryTree x_;
};

constexpr std::uint64_t kLeftStep = 0x2545f4914f6cdd1dull;
constexpr std::uint64_t kRightStep = 0x9e6c63d0676a9a99ull;

/// Counter-based realization of the BST limit: the left fraction at node u
/// is a uniform variate keyed by the address of u's left child, so every
/// query order yields the same measure.
class BstLimitMeasure final : public DyadicMeasure {
 public:
  explicit BstLimitMeasure(std::uint64_t seed) : seed_(seed) {}
  MeasureKind kind() const override { return MeasureKind::bst_limit; }
  std::string describe() const override { return "bst-limit:" + std::to_string(seed_); }

  std::uint64_t root_key() const noexcept { return splitmix64(seed_); }
  static std::uint64_t step(std::uint64_t key, bool bit) noexcept {
    return splitmix64(key ^ (bit ? kRightStep : kLeftStep));
  }
  /// Uniform on (0,1) attached to the node with address key `child_key`.
  static double eta(std::uint64_t child_key) noexcept {
    return (static_cast<double>(splitmix64(child_key) >> 11) + 0.5) * 0x1.0p-53;
  }
  std::uint64_t key_of(const Word& u) const noexcept {
    std::uint64_t k = root_key();
    for (std::size_t i = 0; i < u.size(); ++i) k = step(k, u[i]);
    return k;
  }
  double split(const Word& u) const noexcept { return eta(step(key_of(u), false)); }

  double right_fraction(const Word& u) const override { return 1.0 - split(u); }

  double mass(const Word& u) const override {
    if (u.size() > kLinearMassDepth) return std::exp(log_mass(u));
    double m = 1.0;
    std::uint64_t k = root_key();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double left = eta(step(k, false));
      m *= u[i] ? 1.0 - left : left;
      k = step(k, u[i]);
    }
    return m;
  }
  double log_mass(const Word& u) const override {
    double lm = 0.0;
    std::uint64_t k = root_key();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double left = eta(step(k, false));
      lm += u[i] ? std::log1p(-left) : std::log(left);
      k = step(k, u[i]);
    }
    return lm;
  }

  std::unique_ptr<PathCursor> cursor() const override {
    class Cursor final : public PathCursor {
     public:
      explicit Cursor(const BstLimitMeasure& mu) : mu_(mu) { reset(); }
      void reset() override { key_ = mu_.root_key(); }
      double right_fraction() override { return 1.0 - eta(step(key_, false)); }
      void descend(bool b) override { key_ = step(key_, b); }

     private:
      const BstLimitMeasure& mu_;
      std::uint64_t key_ = 0;
    };
    return std::make_unique<Cursor>(*this);
  }

 private:
  std::uint64_t seed_;
};

std::size_t index_of(const Word& u, std::size_t len) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < len; ++i) idx = (idx << 1) | (u[i] ? 1u : 0u);
  return idx;
}

class TableMeasure final : public DyadicMeasure {
 public:
  explicit TableMeasure(std::vector<std::vector<double>> levels) : levels_(std::move(levels)) {}
  MeasureKind kind() const override { return MeasureKind::table; }
  std::string describe() const override {
    return "table:depth-" + std::to_string(depth());
  }
  std::size_t depth() const noexcept { return levels_.size() - 1; }

  double at(std::size_t level, std::size_t idx) const { return levels_[level][idx]; }

  double q_at(std::size_t level, std::size_t idx, double below_mass) const {
    if (level < depth()) {
      const double m = levels_[level][idx];
      return m == 0.0 ? 0.0 : levels_[level + 1][2 * idx + 1] / m;
    }
    return below_mass == 0.0 ? 0.0 : 0.5;
  }

  double right_fraction(const Word& u) const override {
    const std::size_t level = std::min(u.size(), depth());
    const std::size_t idx = index_of(u, level);
    return q_at(u.size(), idx, levels_[level][idx]);
  }

  double mass(const Word& u) const override {
    const std::size_t level = std::min(u.size(), depth());
    return std::ldexp(levels_[level][index_of(u, level)],
                      -static_cast<int>(u.size() - level));
  }
  double log_mass(const Word& u) const override { return std::log(mass(u)); }

  std::unique_ptr<PathCursor> cursor() const override {
    class Cursor final : public PathCursor {
     public:
      explicit Cursor(const TableMeasure& mu) : mu_(mu) {}
      void reset() override {
        depth_ = 0;
        idx_ = 0;
      }
      double right_fraction() override {
        const std::size_t level = std::min(depth_, mu_.depth());
        return mu_.q_at(depth_, idx_, mu_.at(level, idx_));
      }
      void descend(bool b) override {
        if (depth_ < mu_.depth()) idx_ = 2 * idx_ + (b ? 1 : 0);
        ++depth_;
      }

     private:
      const TableMeasure& mu_;
      std::size_t depth_ = 0;
      std::size_t idx_ = 0;
    };
    return std::make_unique<Cursor>(*this);
  }

 private:
  std::vector<std::vector<double>> levels_;
};

}  // namespace

double DyadicMeasure::mass(const Word& u) const {
  if (u.size() > kLinearMassDepth) return std::exp(log_mass(u));
  double m = 1.0;
  Word path;
  for (std::size_t i = 0; i < u.size() && m > 0.0; ++i) {
    const double q = right_fraction(path);
    m *= u[i] ? q : 1.0 - q;
    path.push_back(u[i]);
  }
  return m;
}

double DyadicMeasure::log_mass(const Word& u) const {
  double lm = 0.0;
  Word path;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double q = right_fraction(path);
    lm += u[i] ? std::log(q) : std::log1p(-q);
    path.push_back(u[i]);
  }
  return lm;
}

std::unique_ptr<PathCursor> DyadicMeasure::cursor() const {
  return std::make_unique<GenericCursor>(*this);
}

Measure uniform_measure() {
  static const Measure instance = std::make_shared<UniformMeasure>();
  return instance;
}

Measure bernoulli_measure(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("bernoulli parameter must lie strictly between 0 and 1, got " +
                                format_double(p));
  }
  if (p == 0.5) return uniform_measure();
  return std::make_shared<BernoulliMeasure>(p);
}

Measure point_mass(const Word& pattern) {
  if (pattern.empty()) throw std::invalid_argument("point mass needs a nonempty bit pattern");
  return std::make_shared<PointMeasure>(pattern);
}

Measure boundary_measure(const BinaryTree& x) {
  if (x.empty()) throw std::invalid_argument("boundary measure of the empty tree");
  return std::make_shared<BoundaryMeasure>(x);
}

Measure sample_bst_limit(std::uint64_t seed) { return std::make_shared<BstLimitMeasure>(seed); }

Measure sample_bst_limit(Rng& rng) { return sample_bst_limit(rng.next()); }

Measure table_measure(std::size_t depth, std::vector<double> masses) {
  if (depth > 30) throw std::length_error("table depth too large");
  if (masses.size() != (std::size_t{1} << depth)) {
    throw std::invalid_argument("table of depth " + std::to_string(depth) + " needs " +
                                std::to_string(std::size_t{1} << depth) + " masses, got " +
                                std::to_string(masses.size()));
  }
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("negative or non-finite mass in table");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("table masses sum to " + format_double(total) + ", not 1");
  }
  std::vector<std::vector<double>> levels(depth + 1);
  levels[depth] = std::move(masses);
  for (std::size_t k = depth; k-- > 0;) {
    levels[k].resize(std::size_t{1} << k);
    for (std::size_t i = 0; i < levels[k].size(); ++i) {
      levels[k][i] = levels[k + 1][2 * i] + levels[k + 1][2 * i + 1];
    }
  }
  return std::make_shared<TableMeasure>(std::move(levels));
}

Measure table_measure_unchecked(std::vector<std::vector<double>> levels) {
  if (levels.empty()) throw std::invalid_argument("table needs at least the root level");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k].size() != (std::size_t{1} << k)) {
      throw std::invalid_argument("level " + std::to_string(k) + " has the wrong size");
    }
  }
  return std::make_shared<TableMeasure>(std::move(levels));
}

double bst_limit_split(const DyadicMeasure& mu, const Word& u) {
  const auto* bst = dynamic_cast<const BstLimitMeasure*>(&mu);
  if (bst == nullptr) throw std::invalid_argument("not a bst-limit measure");
  return bst->split(u);
}

bool positive_on_path(const DyadicMeasure& mu, const Word& u) {
  Word path;
  if (mu.mass(path) <= 0.0) return false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    path.push_back(u[i]);
    if (mu.mass(path) <= 0.0) return false;
  }
  return true;
}

LazyWord::LazyWord(Measure mu, std::uint64_t seed)
    : mu_(std::move(mu)), cursor_(mu_->cursor()), rng_(seed) {
  cursor_->reset();
}

bool LazyWord::next() {
  const bool bit = cursor_->draw(rng_);
  prefix_.push_back(bit);
  return bit;
}

void LazyWord::extend_to(std::size_t length) {
  while (prefix_.size() < length) next();
}

bool LazyWord::at(std::size_t i) {
  extend_to(i + 1);
  return prefix_[i];
}

LazyWord sample_path(const Measure& mu, Rng& rng) { return LazyWord(mu, rng.next()); }

double ultrametric(const Word& v, const Word& w) {
  if (v == w) return 0.0;
  const std::size_t common = common_prefix_length(v, w);
  if (common == v.size() || common == w.size()) {
    throw std::domain_error("ultrametric: '" + v.to_string() + "' and '" + w.to_string() +
                            "' are prefix-related, divergence is undetermined");
  }
  return std::ldexp(1.0, -static_cast<int>(common));
}

double ultrametric(LazyWord& v, LazyWord& w) {
  for (std::size_t i = 0; i < Word::kMaxDepth; ++i) {
    if (v.at(i) != w.at(i)) return std::ldexp(1.0, -static_cast<int>(i));
  }
  throw std::domain_error("ultrametric: lazy words agree up to the maximum depth");
}

std::vector<double> cylinder_masses(const DyadicMeasure& mu, std::size_t depth) {
  if (depth > kMaxCylinderDepth) {
    throw std::length_error("cylinder depth " + std::to_string(depth) + " exceeds the limit " +
                            std::to_string(kMaxCylinderDepth));
  }
  std::vector<double> level{1.0};
  std::vector<Word> words{Word{}};
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<double> next_level(2 * level.size());
    std::vector<Word> next_words;
    next_words.reserve(2 * words.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      const double q = level[i] == 0.0 ? 0.0 : mu.right_fraction(words[i]);
      next_level[2 * i] = level[i] * (1.0 - q);
      next_level[2 * i + 1] = level[i] * q;
      next_words.push_back(words[i].child(false));
      next_words.push_back(words[i].child(true));
    }
    level = std::move(next_level);
    words = std::move(next_words);
  }
  return level;
}

AdditivityReport check_additivity(const DyadicMeasure& mu, std::size_t depth, double tol) {
  AdditivityReport report;
  report.tolerance = tol;
  report.max_defect = std::abs(mu.mass(Word{}) - 1.0);
  std::vector<Word> frontier{Word{}};
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<Word> next;
    next.reserve(2 * frontier.size());
    for (const auto& u : frontier) {
      Word left = u.child(false);
      Word right = u.child(true);
      const double defect = std::abs(mu.mass(u) - mu.mass(left) - mu.mass(right));
      if (defect > report.max_defect) {
        report.max_defect = defect;
        report.worst = u;
      }
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    frontier = std::move(next);
  }
  report.passed = report.max_defect <= tol;
  return report;
}

double boundary_mass(const BinaryTree& x, const Word& u) {
  if (x.empty()) throw std::invalid_argument("boundary measure of the empty tree");
  auto [leaves, extra] = boundary_locate(x, u);
  return std::ldexp(static_cast<double>(leaves) / static_cast<double>(x.size() + 1),
                    -static_cast<int>(extra));
}

std::optional<Rational> boundary_mass_exact(const BinaryTree& x, const Word& u) {
  if (x.empty()) throw std::invalid_argument("boundary measure of the empty tree");
  auto [leaves, extra] = boundary_locate(x, u);
  if (extra > 40) return std::nullopt;
  return Rational(static_cast<std::int64_t>(leaves),
                  static_cast<std::int64_t>(x.size() + 1) << extra);
}

Rational t0(const BinaryTree& x, const Word& u) {
  const auto leaves = static_cast<std::int64_t>(x.size() + 1);
  if (x.empty()) return Rational(u.empty() ? 1 : 0);
  NodeId cur = x.root();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const NodeId nxt = x.child(cur, u[i]);
    if (nxt == kNoNode) {
      // u is a boundary node exactly when this was its last step.
      return Rational(i + 1 == u.size() ? 1 : 0, leaves);
    }
    cur = nxt;
  }
  return Rational(static_cast<std::int64_t>(x.count(cur)) + 1, leaves);
}

}  // namespace treelimit
