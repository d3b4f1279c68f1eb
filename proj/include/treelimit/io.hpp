#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treelimit/binary_tree.hpp"
#include "treelimit/growth.hpp"
#include "treelimit/measures.hpp"
#include "treelimit/word.hpp"

namespace treelimit::io {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view text);
/// Words are always quoted so the root reads back as "" rather than a
/// missing field.
std::string csv_word(const Word& w);
/// Joins already encoded fields and ends the row with CRLF.
void write_csv_row(std::ostream& os, std::span<const std::string> fields);

/// Comma-separated node list. "root" (or an empty list item "") names the
/// empty word. Throws std::invalid_argument on malformed input.
std::vector<Word> parse_node_list(std::string_view text);

/// uniform | bernoulli:<p> | point:<bits> | table:<path> | bst-limit:<seed>
Measure parse_measure(std::string_view spec);

/// Preorder, one word per line; the root is the empty first line.
void write_tree_lines(std::ostream& os, const BinaryTree& x);
BinaryTree read_tree_lines(std::istream& is);
nlohmann::json tree_to_json(const BinaryTree& x);
BinaryTree tree_from_json(const nlohmann::json& j);
/// Accepts either serialization.
BinaryTree load_tree(const std::filesystem::path& path);

/// Header "n=<size> model=<tag> seed=<u64>", then v_2, ..., v_n.
void write_trajectory(std::ostream& os, const Trajectory& tr);
Trajectory read_trajectory(std::istream& is);

/// {"depth": K, "masses": [...]}
nlohmann::json table_to_json(std::size_t depth, std::span<const double> masses);
nlohmann::json measure_table_json(const DyadicMeasure& mu, std::size_t depth);
Measure table_from_json(const nlohmann::json& j);
/// Skips validation, so that corrupted fixtures can be loaded and
/// diagnosed. Interior masses are still formed by summation.
Measure table_from_json_unchecked(const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// word,mass rows for the depth-K cylinders.
void write_cylinder_csv(std::ostream& os, const DyadicMeasure& mu, std::size_t depth);

}  // namespace treelimit::io
