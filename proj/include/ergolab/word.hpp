#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ergolab {

using Bit = std::uint8_t;

// Finite binary string. Every stored symbol is 0 or 1.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Bit> bits);

  static Word from_string(std::string_view ascii01);

  std::string to_string() const;

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  Bit operator[](std::size_t i) const { return bits_[i]; }
  std::span<const Bit> bits() const { return bits_; }

  void push_back(Bit b);
  void reserve(std::size_t n) { bits_.reserve(n); }
  void append(const Word& other);

  Word slice(std::size_t pos, std::size_t len) const;

  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;

 private:
  std::vector<Bit> bits_;
};

// Blocks of length n <= 63 are indexed MSB-first: the first symbol is the
// most significant bit, so index order equals lexicographic order.
std::uint64_t block_index(std::span<const Bit> bits);
std::string block_string(std::uint64_t index, int n);
Word block_word(std::uint64_t index, int n);

}  // namespace ergolab
