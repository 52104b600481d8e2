#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "cmhash/core/linalg.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

/// N x L matrix of {-1, +1} codes, bit-packed one row per group of 64-bit
/// words (set bit means +1). Trailing bits of the last word stay zero, so
/// whole-word popcounts are valid.
class HashCodeMatrix {
 public:
  static constexpr std::size_t kMaxBits = 512;

  HashCodeMatrix() = default;
  HashCodeMatrix(std::size_t rows, std::size_t bits)
      : rows_(rows), bits_(bits), words_per_row_((bits + 63) / 64),
        words_(rows * ((bits + 63) / 64), 0) {
    if (bits == 0 || bits > kMaxBits) {
      throw InputError("hash code length must be in [1, " +
                       std::to_string(kMaxBits) + "]");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t bits() const { return bits_; }

  int get(std::size_t i, std::size_t j) const {
    const std::uint64_t word = words_[i * words_per_row_ + j / 64];
    return (word >> (j % 64)) & 1 ? +1 : -1;
  }

  void set(std::size_t i, std::size_t j, int sign) {
    std::uint64_t& word = words_[i * words_per_row_ + j / 64];
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    if (sign >= 0) word |= mask; else word &= ~mask;
  }

  std::span<const std::uint64_t> row_words(std::size_t i) const {
    return {words_.data() + i * words_per_row_, words_per_row_};
  }

  Vector row_signs(std::size_t i) const {
    Vector v(bits_);
    for (std::size_t j = 0; j < bits_; ++j) v[j] = static_cast<double>(get(i, j));
    return v;
  }

  bool operator==(const HashCodeMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t bits_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Entrywise sign with sign(0) = +1.
inline HashCodeMatrix binarize(const Matrix& h) {
  ensure_finite(h.data, "binarize input");
  HashCodeMatrix codes(h.rows, h.cols);
  for (std::size_t i = 0; i < h.rows; ++i) {
    for (std::size_t j = 0; j < h.cols; ++j) {
      codes.set(i, j, h(i, j) >= 0.0 ? +1 : -1);
    }
  }
  return codes;
}

/// Number of disagreeing bit positions; equals (L - <b1, b2>) / 2 for
/// +-1 codes. XOR + popcount over the packed words.
inline std::size_t hamming_distance(const HashCodeMatrix& a, std::size_t i,
                                    const HashCodeMatrix& b, std::size_t j) {
  if (a.bits() != b.bits()) {
    throw InputError("hamming_distance: code length mismatch");
  }
  const auto wa = a.row_words(i);
  const auto wb = b.row_words(j);
  std::size_t dist = 0;
  for (std::size_t w = 0; w < wa.size(); ++w) {
    dist += static_cast<std::size_t>(std::popcount(wa[w] ^ wb[w]));
  }
  return dist;
}

}  // namespace cmhash
