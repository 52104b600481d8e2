#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "cmhash/data/split.hpp"
#include "cmhash/eval/ranking.hpp"
#include "cmhash/train/encode.hpp"

namespace cmhash {

/// Retrieval direction: which modality queries and which is ranked.
enum class Direction { i2t, t2i };

inline std::string direction_name(Direction d) {
  return d == Direction::i2t ? "i2t" : "t2i";
}

struct DirectionEval {
  double map = 0.0;
  PrCurve pr;
};

struct SplitDescriptor {
  std::size_t n_query = 0;
  std::size_t n_train = 0;
  std::size_t n_gallery = 0;
  std::uint64_t seed = 0;
};

struct EvalReport {
  double map_i2t = 0.0;
  double map_t2i = 0.0;
  PrCurve pr_i2t;
  PrCurve pr_t2i;
  std::size_t code_length = 0;
  SplitDescriptor split;
  std::uint64_t seed = 0;
  std::string timestamp;
};

/// Encodes and binarizes the query modality and the gallery modality for
/// one direction, then scores Hamming ranking. Two instances count as
/// relevant iff they share at least one label.
inline DirectionEval evaluate_direction(const EncoderParams& image_head,
                                        const EncoderParams& text_head,
                                        const Dataset& data, const SplitSpec& split,
                                        Direction dir,
                                        std::span<const double> recall_grid) {
  if (image_head.output_dim() != text_head.output_dim()) {
    throw InputError("evaluate: heads disagree on code length");
  }
  split.validate(data);  // rejects overlapping query/gallery sets

  const Modality query_modality = dir == Direction::i2t ? Modality::image : Modality::text;
  const Modality gallery_modality = dir == Direction::i2t ? Modality::text : Modality::image;
  const EncoderParams& query_head = dir == Direction::i2t ? image_head : text_head;
  const EncoderParams& gallery_head = dir == Direction::i2t ? text_head : image_head;

  const HashCodeMatrix query_codes = binarize(encode_modality(
      query_head, data, split.query, query_modality, LabelInputMode::multihot));
  const HashCodeMatrix gallery_codes = binarize(encode_modality(
      gallery_head, data, split.gallery, gallery_modality, LabelInputMode::multihot));

  const RelevanceFn relevant = [&](std::size_t q, std::size_t g) {
    return labels_overlap(data.instances[split.query[q]],
                          data.instances[split.gallery[g]]);
  };

  DirectionEval result;
  result.map = map_score(query_codes, gallery_codes, relevant);
  result.pr = pr_curve(query_codes, gallery_codes, relevant, recall_grid);
  return result;
}

/// Full report covering both retrieval directions.
inline EvalReport evaluate(const EncoderParams& image_head, const EncoderParams& text_head,
                           const Dataset& data, const SplitSpec& split,
                           std::span<const double> recall_grid) {
  EvalReport report;
  const DirectionEval i2t =
      evaluate_direction(image_head, text_head, data, split, Direction::i2t, recall_grid);
  const DirectionEval t2i =
      evaluate_direction(image_head, text_head, data, split, Direction::t2i, recall_grid);
  report.map_i2t = i2t.map;
  report.map_t2i = t2i.map;
  report.pr_i2t = i2t.pr;
  report.pr_t2i = t2i.pr;
  report.code_length = image_head.output_dim();
  report.split = {split.query.size(), split.train.size(), split.gallery.size(), split.seed};
  return report;
}

}  // namespace cmhash
