#pragma once

#include <span>
#include <string>
#include <vector>

#include "cmhash/data/instance.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

enum class PromptMode { prompt, raw };

/// Renders label names as query strings for an external text encoder.
/// prompt mode wraps each name in the template "An image of <name>";
/// raw mode passes the bare name through (for comparing against
/// untemplated label embeddings).
inline std::vector<std::string> make_prompts(std::span<const std::string> label_names,
                                             PromptMode mode) {
  std::vector<std::string> out;
  out.reserve(label_names.size());
  for (const std::string& name : label_names) {
    if (name.empty()) throw InputError("make_prompts: empty label name");
    out.push_back(mode == PromptMode::prompt ? "An image of " + name : name);
  }
  return out;
}

enum class LabelInputMode { multihot, prompt_feat };

inline LabelInputMode label_input_mode_from_name(const std::string& name) {
  if (name == "multihot") return LabelInputMode::multihot;
  if (name == "prompt_feat") return LabelInputMode::prompt_feat;
  throw InputError("unknown label input mode: " + name);
}

inline std::string label_input_mode_name(LabelInputMode mode) {
  return mode == LabelInputMode::multihot ? "multihot" : "prompt_feat";
}

/// Input vector fed to the label hashing head: either a K-length multi-hot
/// indicator or the stored externally-embedded prompt feature.
inline Vector label_input_vector(const Instance& inst, std::size_t num_labels,
                                 LabelInputMode mode) {
  if (mode == LabelInputMode::multihot) {
    Vector v(num_labels, 0.0);
    for (int l : inst.labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= num_labels) {
        throw InputError("label_input_vector: label id out of range");
      }
      v[static_cast<std::size_t>(l)] = 1.0;
    }
    return v;
  }
  if (!inst.label_prompt_feat) {
    throw DataError("instance '" + inst.id +
                    "' has no label prompt features (prompt_feat mode)");
  }
  return *inst.label_prompt_feat;
}

}  // namespace cmhash
