#include "treelimit/word.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace treelimit {

Word Word::parse(std::string_view text) {
  Word w;
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("malformed word '" + std::string(text) +
                                  "': only '0' and '1' are allowed");
    }
    w.push_back(c == '1');
  }
  return w;
}

Word Word::repeated(bool bit, std::size_t length) {
  Word w;
  for (std::size_t i = 0; i < length; ++i) w.push_back(bit);
  return w;
}

void Word::push_back(bool bit) {
  if (length_ >= kMaxDepth) {
    throw std::length_error("word depth exceeds the supported maximum of " +
                            std::to_string(kMaxDepth));
  }
  if ((length_ & 63) == 0) blocks_.push_back(0);
  if (bit) blocks_.back() |= std::uint64_t{1} << (length_ & 63);
  ++length_;
}

void Word::pop_back() {
  if (length_ == 0) throw std::out_of_range("pop_back on the empty word");
  --length_;
  if ((length_ & 63) == 0) {
    blocks_.pop_back();
  } else {
    blocks_.back() &= ~(std::uint64_t{1} << (length_ & 63));
  }
}

Word Word::parent() const {
  if (empty()) throw std::out_of_range("the root has no parent");
  Word w = *this;
  w.pop_back();
  return w;
}

Word Word::prefix(std::size_t len) const {
  if (len > length_) throw std::out_of_range("prefix longer than word");
  Word w;
  w.blocks_.assign(blocks_.begin(), blocks_.begin() + static_cast<std::ptrdiff_t>((len + 63) / 64));
  w.length_ = len;
  if ((len & 63) != 0) w.blocks_.back() &= (std::uint64_t{1} << (len & 63)) - 1;
  return w;
}

std::size_t Word::count_ones() const noexcept {
  std::size_t n = 0;
  for (auto b : blocks_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

Word& Word::operator+=(const Word& tail) {
  if (length_ + tail.length_ > kMaxDepth) {
    throw std::length_error("concatenation exceeds the supported maximum depth");
  }
  for (std::size_t i = 0; i < tail.length_; ++i) push_back(tail[i]);
  return *this;
}

std::string Word::to_string() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  const std::size_t common = common_prefix_length(a, b);
  if (common < a.size() && common < b.size()) {
    return a[common] ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return a.size() <=> b.size();
}

std::size_t Word::hash() const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ length_;
  for (auto b : blocks_) {
    h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::size_t common_prefix_length(const Word& v, const Word& w) noexcept {
  const std::size_t limit = std::min(v.size(), w.size());
  std::size_t i = 0;
  while (i < limit && v[i] == w[i]) ++i;
  return i;
}

bool is_prefix(const Word& u, const Word& v, bool reflexive) noexcept {
  if (u.size() > v.size()) return false;
  if (u.size() == v.size() && !reflexive) return false;
  return common_prefix_length(u, v) == u.size();
}

Word longest_common_prefix(const Word& v, const Word& w) {
  return v.prefix(common_prefix_length(v, w));
}

Word xor_act(const Word& v, const Word& u) {
  if (v.size() < u.size()) {
    throw std::invalid_argument("group element supplies fewer bits than the word length");
  }
  Word out;
  for (std::size_t i = 0; i < u.size(); ++i) out.push_back(u[i] != v[i]);
  return out;
}

}  // namespace treelimit
