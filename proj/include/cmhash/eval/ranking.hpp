#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cmhash/eval/hashcode.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

/// Gallery indices by ascending Hamming distance from the query code.
/// Ties break by ascending gallery index: a counting sort over distances
/// [0, L] visits indices in order, which makes rankings deterministic.
inline std::vector<std::size_t> rank_gallery(const HashCodeMatrix& queries,
                                             std::size_t query_idx,
                                             const HashCodeMatrix& gallery) {
  if (queries.bits() != gallery.bits()) {
    throw InputError("rank_gallery: code length mismatch");
  }
  std::vector<std::vector<std::size_t>> buckets(gallery.bits() + 1);
  for (std::size_t g = 0; g < gallery.rows(); ++g) {
    buckets[hamming_distance(queries, query_idx, gallery, g)].push_back(g);
  }
  std::vector<std::size_t> order;
  order.reserve(gallery.rows());
  for (const auto& bucket : buckets) {
    order.insert(order.end(), bucket.begin(), bucket.end());
  }
  return order;
}

/// Average precision of a ranked binary relevance list: the mean over
/// relevant positions k of (relevant items in the top k) / k. Zero when
/// nothing is relevant.
inline double average_precision(std::span<const std::uint8_t> relevance) {
  if (relevance.empty()) throw InputError("average_precision: empty ranking");
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < relevance.size(); ++k) {
    if (relevance[k]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

using RelevanceFn = std::function<bool(std::size_t query, std::size_t item)>;

/// Mean average precision over all queries, ranking the full gallery.
inline double map_score(const HashCodeMatrix& queries, const HashCodeMatrix& gallery,
                        const RelevanceFn& relevant) {
  if (queries.rows() == 0) throw InputError("map_score: no queries");
  double total = 0.0;
  std::vector<std::uint8_t> rel(gallery.rows());
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto order = rank_gallery(queries, q, gallery);
    for (std::size_t k = 0; k < order.size(); ++k) {
      rel[k] = relevant(q, order[k]) ? 1 : 0;
    }
    total += average_precision(rel);
  }
  return total / static_cast<double>(queries.rows());
}

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;
  std::size_t skipped_queries = 0;  // queries with no relevant gallery item
};

/// Recall levels 0.1 .. 0.9, step 0.1.
inline std::vector<double> default_recall_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

/// Precision at the smallest ranking depth reaching each recall level,
/// averaged over queries. Queries without any relevant gallery item are
/// skipped and counted in the curve metadata.
inline PrCurve pr_curve(const HashCodeMatrix& queries, const HashCodeMatrix& gallery,
                        const RelevanceFn& relevant, std::span<const double> recall_grid) {
  if (queries.rows() == 0) throw InputError("pr_curve: no queries");
  double prev = 0.0;
  for (double r : recall_grid) {
    if (r <= prev || r > 1.0) {
      throw InputError("pr_curve: recall grid must be strictly increasing in (0, 1]");
    }
    prev = r;
  }

  PrCurve curve;
  std::vector<double> precision_sum(recall_grid.size(), 0.0);
  std::size_t used = 0;

  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto order = rank_gallery(queries, q, gallery);
    std::size_t total_relevant = 0;
    for (std::size_t g = 0; g < gallery.rows(); ++g) {
      if (relevant(q, g)) ++total_relevant;
    }
    if (total_relevant == 0) {
      ++curve.skipped_queries;
      continue;
    }
    ++used;
    std::size_t hits = 0;
    std::size_t depth = 0;
    for (std::size_t gi = 0; gi < recall_grid.size(); ++gi) {
      // smallest integer hit count reaching the recall level, with slack
      // against r * total landing epsilon above an integer
      const auto needed = static_cast<std::size_t>(
          std::ceil(recall_grid[gi] * static_cast<double>(total_relevant) - 1e-9));
      while (hits < needed && depth < order.size()) {
        if (relevant(q, order[depth])) ++hits;
        ++depth;
      }
      precision_sum[gi] += static_cast<double>(hits) / static_cast<double>(depth);
    }
  }

  for (std::size_t gi = 0; gi < recall_grid.size(); ++gi) {
    curve.points.push_back(
        {recall_grid[gi], used == 0 ? 0.0 : precision_sum[gi] / static_cast<double>(used)});
  }
  return curve;
}

}  // namespace cmhash
