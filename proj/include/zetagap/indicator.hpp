#ifndef ZETAGAP_INDICATOR_HPP
#define ZETAGAP_INDICATOR_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "zetagap/errors.hpp"

namespace zetagap {

/// A model indicator delta in {0,1}^p, stored as packed 64-bit words.
class Indicator {
 public:
  Indicator() = default;
  explicit Indicator(std::size_t p) : p_(p), words_((p + 63) / 64, 0) {}

  /// Bits of `mask` become coordinates 0..p-1 (bit j is coordinate j).
  static Indicator from_mask(std::uint64_t mask, std::size_t p) {
    if (p < 64 && (mask >> p) != 0) throw DomainError("mask has bits beyond p");
    Indicator d(p);
    if (p > 0) d.words_[0] = mask;
    return d;
  }

  /// Parse a string of '0'/'1' characters, coordinate 0 first.
  static Indicator from_bits(std::string_view bits) {
    Indicator d(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[j] == '1')
        d.set(j);
      else if (bits[j] != '0')
        throw ParseError("indicator bits must be 0 or 1");
    }
    return d;
  }

  static Indicator first_k(std::size_t p, std::size_t k) {
    Indicator d(p);
    for (std::size_t j = 0; j < std::min(p, k); ++j) d.set(j);
    return d;
  }

  std::size_t size() const noexcept { return p_; }

  bool test(std::size_t j) const { return (words_[j >> 6] >> (j & 63)) & 1U; }
  bool operator[](std::size_t j) const { return test(j); }

  void set(std::size_t j, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (j & 63);
    if (value)
      words_[j >> 6] |= bit;
    else
      words_[j >> 6] &= ~bit;
  }
  void reset(std::size_t j) { set(j, false); }
  void flip(std::size_t j) { words_[j >> 6] ^= std::uint64_t{1} << (j & 63); }

  /// ||delta||_0
  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  Indicator complement() const {
    Indicator c(p_);
    for (std::size_t i = 0; i < words_.size(); ++i) c.words_[i] = ~words_[i];
    c.clear_tail();
    return c;
  }

  /// delta ⊇ other
  bool contains(const Indicator& other) const {
    check_same_size(other);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if ((other.words_[i] & ~words_[i]) != 0) return false;
    return true;
  }

  std::size_t intersection_count(const Indicator& other) const {
    check_same_size(other);
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }

  Indicator minus(const Indicator& other) const {
    check_same_size(other);
    Indicator r(p_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & ~other.words_[i];
    return r;
  }

  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> idx;
    idx.reserve(count());
    for (std::size_t j = 0; j < p_; ++j)
      if (test(j)) idx.push_back(j);
    return idx;
  }

  std::vector<std::size_t> zeros() const {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < p_; ++j)
      if (!test(j)) idx.push_back(j);
    return idx;
  }

  /// Low 64 coordinates as a mask; only meaningful for p <= 64.
  std::uint64_t mask() const { return words_.empty() ? 0 : words_[0]; }

  std::string to_bits() const {
    std::string s(p_, '0');
    for (std::size_t j = 0; j < p_; ++j)
      if (test(j)) s[j] = '1';
    return s;
  }

  /// Hex digits, four coordinates per digit, coordinate 0 in the low bit of the first digit.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s((p_ + 3) / 4, '0');
    for (std::size_t j = 0; j < p_; ++j)
      if (test(j)) {
        auto& c = s[j / 4];
        const int v = (c <= '9' ? c - '0' : c - 'a' + 10) | (1 << (j % 4));
        c = kDigits[v];
      }
    return s;
  }

  friend bool operator==(const Indicator&, const Indicator&) = default;

 private:
  void check_same_size(const Indicator& other) const {
    if (other.p_ != p_) throw DomainError("indicator sizes differ");
  }
  void clear_tail() {
    if (p_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (p_ % 64)) - 1;
  }

  std::size_t p_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace zetagap

#endif
