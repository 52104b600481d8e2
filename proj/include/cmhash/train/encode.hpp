#pragma once

#include <span>

#include "cmhash/core/mlp.hpp"
#include "cmhash/data/instance.hpp"
#include "cmhash/data/prompts.hpp"

namespace cmhash {

enum class Modality { image, text, label };

inline Vector modality_input(const Dataset& data, std::size_t idx, Modality m,
                             LabelInputMode label_mode) {
  const Instance& inst = data.instances[idx];
  switch (m) {
    case Modality::image: return inst.image_feat;
    case Modality::text: return inst.text_feat;
    case Modality::label: return label_input_vector(inst, data.num_labels(), label_mode);
  }
  throw InputError("unknown modality");
}

/// Encodes the selected modality of every listed instance into one row of
/// continuous hash representations.
inline Matrix encode_modality(const EncoderParams& head, const Dataset& data,
                              std::span<const std::size_t> ids, Modality m,
                              LabelInputMode label_mode) {
  Matrix h(ids.size(), head.output_dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const ForwardTrace trace = mlp_forward(head, modality_input(data, ids[i], m, label_mode));
    std::copy(trace.output().begin(), trace.output().end(), h.row(i).begin());
  }
  return h;
}

}  // namespace cmhash
