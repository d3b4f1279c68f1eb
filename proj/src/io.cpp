#include "treelimit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace treelimit::io {

namespace {

double parse_probability(std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid probability '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("invalid probability '" + s + "'");
  return p;
}

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument(std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> masses_of(const nlohmann::json& j, std::size_t& depth) {
  if (!j.is_object() || !j.contains("depth") || !j.contains("masses")) {
    throw std::invalid_argument("table JSON needs \"depth\" and \"masses\"");
  }
  depth = j.at("depth").get<std::size_t>();
  return j.at("masses").get<std::vector<double>>();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_word(const Word& w) { return "\"" + w.to_string() + "\""; }

void write_csv_row(std::ostream& os, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) os << ',';
    os << fields[i];
  }
  os << "\r\n";
}

std::vector<Word> parse_node_list(std::string_view text) {
  std::vector<Word> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "root" || item == "\"\"") item = {};
    out.push_back(Word::parse(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Measure parse_measure(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg = colon == spec.npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "uniform") {
    if (colon != spec.npos) throw std::invalid_argument("uniform takes no parameter");
    return uniform_measure();
  }
  if (colon == spec.npos) {
    throw std::invalid_argument("unknown measure '" + std::string(spec) + "'");
  }
  if (head == "bernoulli") return bernoulli_measure(parse_probability(arg));
  if (head == "point") return point_mass(Word::parse(arg));
  if (head == "table") return table_from_json(read_json(std::filesystem::path(std::string(arg))));
  if (head == "bst-limit") return sample_bst_limit(parse_u64(arg, "seed"));
  throw std::invalid_argument("unknown measure '" + std::string(spec) + "'");
}

void write_tree_lines(std::ostream& os, const BinaryTree& x) {
  for (const auto& w : x.words()) os << w.to_string() << '\n';
}

BinaryTree read_tree_lines(std::istream& is) {
  BinaryTree x;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    x.insert(Word::parse(line));
  }
  return x;
}

nlohmann::json tree_to_json(const BinaryTree& x) {
  auto j = nlohmann::json::array();
  for (const auto& w : x.words()) j.push_back(w.to_string());
  return j;
}

BinaryTree tree_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("tree JSON must be an array of words");
  BinaryTree x;
  for (const auto& item : j) x.insert(Word::parse(item.get<std::string>()));
  return x;
}

BinaryTree load_tree(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    return tree_from_json(nlohmann::json::parse(text));
  }
  std::istringstream lines(text);
  return read_tree_lines(lines);
}

void write_trajectory(std::ostream& os, const Trajectory& tr) {
  os << "n=" << tr.size() << " model=" << tr.model() << " seed=" << tr.seed() << '\n';
  for (const auto& w : tr.log()) os << w.to_string() << '\n';
}

Trajectory read_trajectory(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("missing trajectory header");
  std::istringstream fields(header);
  std::string n_field, model_field, seed_field;
  fields >> n_field >> model_field >> seed_field;
  if (n_field.rfind("n=", 0) != 0 || model_field.rfind("model=", 0) != 0 ||
      seed_field.rfind("seed=", 0) != 0) {
    throw std::invalid_argument("malformed trajectory header '" + header + "'");
  }
  const auto n = parse_u64(std::string_view(n_field).substr(2), "size");
  const auto seed = parse_u64(std::string_view(seed_field).substr(5), "seed");
  std::vector<Word> log;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    log.push_back(Word::parse(line));
  }
  if (log.size() + 1 != n) {
    throw std::invalid_argument("trajectory header says n=" + std::to_string(n) + " but the log has " +
                                std::to_string(log.size()) + " words");
  }
  return Trajectory::replay(log, model_field.substr(6), seed);
}

nlohmann::json table_to_json(std::size_t depth, std::span<const double> masses) {
  return {{"depth", depth}, {"masses", std::vector<double>(masses.begin(), masses.end())}};
}

nlohmann::json measure_table_json(const DyadicMeasure& mu, std::size_t depth) {
  const auto masses = cylinder_masses(mu, depth);
  return table_to_json(depth, masses);
}

Measure table_from_json(const nlohmann::json& j) {
  std::size_t depth = 0;
  auto masses = masses_of(j, depth);
  return table_measure(depth, std::move(masses));
}

Measure table_from_json_unchecked(const nlohmann::json& j) {
  std::size_t depth = 0;
  auto masses = masses_of(j, depth);
  if (depth > 30 || masses.size() != (std::size_t{1} << depth)) {
    throw std::invalid_argument("table mass count does not match its depth");
  }
  std::vector<std::vector<double>> levels(depth + 1);
  levels[depth] = std::move(masses);
  for (std::size_t k = depth; k-- > 0;) {
    levels[k].resize(std::size_t{1} << k);
    for (std::size_t i = 0; i < levels[k].size(); ++i) {
      levels[k][i] = levels[k + 1][2 * i] + levels[k + 1][2 * i + 1];
    }
  }
  return table_measure_unchecked(std::move(levels));
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_cylinder_csv(std::ostream& os, const DyadicMeasure& mu, std::size_t depth) {
  const auto masses = cylinder_masses(mu, depth);
  const std::string header[] = {"word", "mass"};
  write_csv_row(os, header);
  for (std::size_t i = 0; i < masses.size(); ++i) {
    Word w;
    for (std::size_t b = depth; b-- > 0;) w.push_back(((i >> b) & 1u) != 0);
    const std::string row[] = {csv_word(w), format_double(masses[i])};
    write_csv_row(os, row);
  }
}

}  // namespace treelimit::io
