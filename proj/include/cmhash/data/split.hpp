#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cmhash/core/rng.hpp"
#include "cmhash/data/instance.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

/// Query / train / gallery partition, as indices into a Dataset.
/// Invariants: query and gallery are disjoint, together they cover the
/// dataset, and the train set is a subset of the gallery.
struct SplitSpec {
  std::vector<std::size_t> query;
  std::vector<std::size_t> train;
  std::vector<std::size_t> gallery;
  std::uint64_t seed = 0;

  void validate(const Dataset& data) const {
    std::vector<std::uint8_t> in_query(data.size(), 0), in_gallery(data.size(), 0);
    auto mark = [&](const std::vector<std::size_t>& ids, std::vector<std::uint8_t>& flags,
                    const char* what) {
      for (std::size_t idx : ids) {
        if (idx >= data.size()) throw InputError(std::string(what) + " index out of range");
        if (flags[idx]) throw InputError(std::string(what) + " contains duplicate index");
        flags[idx] = 1;
      }
    };
    mark(query, in_query, "split query");
    mark(gallery, in_gallery, "split gallery");
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (in_query[i] && in_gallery[i]) throw InputError("split query/gallery overlap");
      if (!in_query[i] && !in_gallery[i]) throw InputError("split does not cover dataset");
    }
    std::vector<std::uint8_t> in_train(data.size(), 0);
    mark(train, in_train, "split train");
    for (std::size_t idx : train) {
      if (!in_gallery[idx]) throw InputError("split train set not contained in gallery");
    }
  }
};

/// Random query/gallery split with a train subset drawn from the gallery.
inline SplitSpec split_query_gallery(const Dataset& data, std::size_t n_query,
                                     std::size_t n_train, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n_query + 1 > n) {
    throw InputError("split: n_query leaves no gallery (" + std::to_string(n_query) +
                     " of " + std::to_string(n) + ")");
  }
  if (n_train > n - n_query) {
    throw InputError("split: n_train exceeds gallery size");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x51));
  rng.shuffle(order);

  SplitSpec split;
  split.seed = seed;
  split.query.assign(order.begin(), order.begin() + n_query);
  split.gallery.assign(order.begin() + n_query, order.end());
  split.train.assign(split.gallery.begin(), split.gallery.begin() + n_train);
  return split;
}

/// Cross-validation fold: the old train set is cut into five near-equal
/// parts; part `fold` becomes the new query set, the old query set plus the
/// remaining parts become the new train set, and everything outside the new
/// query set is the new gallery.
inline SplitSpec split_five_fold(const Dataset& data, const SplitSpec& old_split,
                                 std::size_t fold, std::uint64_t seed) {
  constexpr std::size_t kFolds = 5;
  if (fold >= kFolds) throw InputError("fold must be in [0, 5)");
  if (old_split.train.size() < kFolds) {
    throw InputError("train set too small for five folds");
  }

  std::vector<std::size_t> shuffled = old_split.train;
  Rng rng(derive_seed(seed, 0xf01d));
  rng.shuffle(shuffled);

  // Part k gets one extra element while remainder lasts.
  const std::size_t base = shuffled.size() / kFolds;
  const std::size_t extra = shuffled.size() % kFolds;
  std::size_t begin = 0;
  std::size_t part_begin = 0, part_end = 0;
  for (std::size_t k = 0; k < kFolds; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    if (k == fold) {
      part_begin = begin;
      part_end = begin + len;
    }
    begin += len;
  }

  SplitSpec next;
  next.seed = seed;
  next.query.assign(shuffled.begin() + part_begin, shuffled.begin() + part_end);
  next.train = old_split.query;
  next.train.insert(next.train.end(), shuffled.begin(), shuffled.begin() + part_begin);
  next.train.insert(next.train.end(), shuffled.begin() + part_end, shuffled.end());

  std::vector<std::uint8_t> is_query(data.size(), 0);
  for (std::size_t idx : next.query) is_query[idx] = 1;
  next.gallery.reserve(data.size() - next.query.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!is_query[i]) next.gallery.push_back(i);
  }
  return next;
}

}  // namespace cmhash
