#include "ergolab/word.hpp"

#include "ergolab/errors.hpp"

namespace ergolab {

Word::Word(std::vector<Bit> bits) : bits_(std::move(bits)) {
  for (Bit b : bits_) {
    if (b > 1) throw RangeError("word symbol outside {0,1}");
  }
}

Word Word::from_string(std::string_view ascii01) {
  std::vector<Bit> bits;
  bits.reserve(ascii01.size());
  for (char c : ascii01) {
    if (c == '0') {
      bits.push_back(0);
    } else if (c == '1') {
      bits.push_back(1);
    } else {
      throw RangeError(std::string("invalid character in binary word: '") + c + "'");
    }
  }
  Word w;
  w.bits_ = std::move(bits);
  return w;
}

std::string Word::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
  return s;
}

void Word::push_back(Bit b) {
  if (b > 1) throw RangeError("word symbol outside {0,1}");
  bits_.push_back(b);
}

void Word::append(const Word& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }

Word Word::slice(std::size_t pos, std::size_t len) const {
  if (pos > bits_.size() || len > bits_.size() - pos) throw RangeError("word slice out of range");
  Word w;
  w.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                 bits_.begin() + static_cast<std::ptrdiff_t>(pos + len));
  return w;
}

std::uint64_t block_index(std::span<const Bit> bits) {
  std::uint64_t idx = 0;
  for (Bit b : bits) idx = (idx << 1) | b;
  return idx;
}

std::string block_string(std::uint64_t index, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = n - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = static_cast<char>('0' + (index & 1U));
    index >>= 1;
  }
  return s;
}

Word block_word(std::uint64_t index, int n) { return Word::from_string(block_string(index, n)); }

}  // namespace ergolab
