#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cmhash/core/linalg.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

/// One multimodal item: image feature vector, text feature vector, and a
/// nonempty set of label ids. An externally embedded label-prompt feature
/// vector may be attached for pipelines with a real text encoder.
struct Instance {
  std::string id;
  Vector image_feat;
  Vector text_feat;
  std::vector<int> labels;  // sorted, unique, nonempty
  std::optional<Vector> label_prompt_feat;

  bool operator==(const Instance&) const = default;
};

/// Sorted-vector set intersection test.
inline bool labels_overlap(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i; else ++j;
  }
  return false;
}

inline bool labels_overlap(const Instance& a, const Instance& b) {
  return labels_overlap(a.labels, b.labels);
}

struct Dataset {
  std::vector<Instance> instances;
  std::vector<std::string> label_names;
  std::size_t d_v = 0;
  std::size_t d_t = 0;
  std::size_t d_y = 0;  // 0 when no label-prompt features are carried

  std::size_t size() const { return instances.size(); }
  std::size_t num_labels() const { return label_names.size(); }

  bool operator==(const Dataset&) const = default;

  void validate() const {
    if (label_names.empty()) throw DataError("dataset declares no labels");
    if (d_v == 0 || d_t == 0) throw DataError("dataset feature dims must be positive");
    std::unordered_set<std::string> seen_ids;
    for (const Instance& inst : instances) {
      validate_instance(inst);
      if (!seen_ids.insert(inst.id).second) {
        throw DataError("duplicate instance id: " + inst.id);
      }
    }
  }

  void validate_instance(const Instance& inst) const {
    auto fail = [&](const std::string& msg) {
      throw DataError("instance '" + inst.id + "': " + msg);
    };
    if (inst.labels.empty()) fail("empty label set");
    if (!std::is_sorted(inst.labels.begin(), inst.labels.end())) fail("labels not sorted");
    if (std::adjacent_find(inst.labels.begin(), inst.labels.end()) != inst.labels.end()) {
      fail("duplicate label ids");
    }
    for (int l : inst.labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= num_labels()) {
        fail("label id " + std::to_string(l) + " out of range [0, " +
             std::to_string(num_labels()) + ")");
      }
    }
    if (inst.image_feat.size() != d_v) {
      fail("image feature length " + std::to_string(inst.image_feat.size()) +
           " != declared d_v " + std::to_string(d_v));
    }
    if (inst.text_feat.size() != d_t) {
      fail("text feature length " + std::to_string(inst.text_feat.size()) +
           " != declared d_t " + std::to_string(d_t));
    }
    if (inst.label_prompt_feat) {
      if (d_y == 0) fail("carries label_prompt_feat but dataset declares no d_y");
      if (inst.label_prompt_feat->size() != d_y) {
        fail("label prompt feature length != declared d_y");
      }
      if (!all_finite(*inst.label_prompt_feat)) fail("non-finite label prompt feature");
    }
    if (!all_finite(inst.image_feat) || !all_finite(inst.text_feat)) {
      fail("non-finite feature value");
    }
  }
};

}  // namespace cmhash
