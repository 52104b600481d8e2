#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cmhash/data/instance.hpp"

namespace cmhash {

/// Dense binary pairwise similarity: entry (i, j) is 1 iff the row and
/// column instances share at least one label.
struct SimilarityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> entries;  // row-major, values in {0, 1}

  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0) {}

  std::uint8_t at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  void set(std::size_t i, std::size_t j, std::uint8_t v) { entries[i * cols + j] = v; }
};

inline SimilarityMatrix build_similarity(std::span<const Instance> row_insts,
                                         std::span<const Instance> col_insts) {
  SimilarityMatrix s(row_insts.size(), col_insts.size());
  for (std::size_t i = 0; i < row_insts.size(); ++i) {
    for (std::size_t j = 0; j < col_insts.size(); ++j) {
      s.set(i, j, labels_overlap(row_insts[i], col_insts[j]) ? 1 : 0);
    }
  }
  return s;
}

/// Similarity over two index subsets of one dataset.
inline SimilarityMatrix build_similarity(const Dataset& data,
                                         std::span<const std::size_t> row_ids,
                                         std::span<const std::size_t> col_ids) {
  SimilarityMatrix s(row_ids.size(), col_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    const Instance& a = data.instances[row_ids[i]];
    for (std::size_t j = 0; j < col_ids.size(); ++j) {
      s.set(i, j, labels_overlap(a, data.instances[col_ids[j]]) ? 1 : 0);
    }
  }
  return s;
}

}  // namespace cmhash
