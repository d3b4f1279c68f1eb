#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace treelimit {

/// A finite bit string, the address of a node in the complete infinite
/// binary tree. The empty word is the root.
///
/// Bits are packed 64 per block; bit `i` (0-based) lives in block `i / 64`
/// at position `i % 64`. Unused high bits of the last block are always zero,
/// so defaulted equality and hashing are well-defined.
class Word {
 public:
  static constexpr std::size_t kMaxDepth = 4096;

  Word() = default;

  /// Parses the canonical textual form, e.g. "01" for (0,1) and "" for the root.
  static Word parse(std::string_view text);
  static Word repeated(bool bit, std::size_t length);

  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return ((blocks_[i >> 6] >> (i & 63)) & 1u) != 0;
  }
  bool back() const noexcept { return (*this)[length_ - 1]; }

  void push_back(bool bit);
  void pop_back();
  void clear() noexcept {
    blocks_.clear();
    length_ = 0;
  }

  Word child(bool bit) const {
    Word w = *this;
    w.push_back(bit);
    return w;
  }
  Word parent() const;
  Word prefix(std::size_t len) const;
  std::size_t count_ones() const noexcept;

  Word& operator+=(const Word& tail);
  friend Word operator+(Word head, const Word& tail) {
    head += tail;
    return head;
  }

  std::string to_string() const;

  friend bool operator==(const Word& a, const Word& b) = default;
  /// Lexicographic order with a proper prefix sorting before its extensions.
  /// On an antichain (e.g. a tree boundary) this is the left-to-right order.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

  std::size_t hash() const noexcept;

 private:
  std::vector<std::uint64_t> blocks_;
  std::size_t length_ = 0;
};

/// Strict prefix order u < v; with `reflexive` the weak order u <= v.
bool is_prefix(const Word& u, const Word& v, bool reflexive = false) noexcept;

/// Length of the longest common prefix.
std::size_t common_prefix_length(const Word& v, const Word& w) noexcept;
Word longest_common_prefix(const Word& v, const Word& w);

/// Componentwise XOR of `u` with the first |u| bits of `v` (the action of
/// the sequence group on words). Requires |v| >= |u|.
Word xor_act(const Word& v, const Word& u);

}  // namespace treelimit

template <>
struct std::hash<treelimit::Word> {
  std::size_t operator()(const treelimit::Word& w) const noexcept { return w.hash(); }
};
