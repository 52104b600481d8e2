#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmhash/core/rng.hpp"
#include "cmhash/data/instance.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

struct SyntheticConfig {
  std::size_t num_labels = 3;
  std::size_t per_label = 100;
  std::size_t d_v = 32;
  std::size_t d_t = 32;
  double noise_sigma = 0.3;
  double multilabel_prob = 0.0;
  std::uint64_t seed = 0;
};

/// Desk-scale dataset generator. Each label gets one Gaussian centroid per
/// modality; an instance draws the mean of its labels' centroids plus
/// isotropic noise. With probability multilabel_prob an instance gains one
/// extra label, which gives label-overlapping pairs genuinely intermediate
/// features.
inline Dataset gen_synthetic(const SyntheticConfig& cfg) {
  if (cfg.num_labels < 2) throw InputError("gen_synthetic: need at least 2 labels");
  if (cfg.per_label < 1) throw InputError("gen_synthetic: per_label must be >= 1");
  if (cfg.d_v == 0 || cfg.d_t == 0) throw InputError("gen_synthetic: dims must be positive");
  if (cfg.noise_sigma < 0.0) throw InputError("gen_synthetic: noise_sigma must be >= 0");
  if (cfg.multilabel_prob < 0.0 || cfg.multilabel_prob > 1.0) {
    throw InputError("gen_synthetic: multilabel_prob must be in [0, 1]");
  }

  Rng rng(derive_seed(cfg.seed, 0x5e17));

  auto draw_centroid = [&](std::size_t dim) {
    Vector c(dim);
    for (double& x : c) x = rng.normal();
    return c;
  };
  std::vector<Vector> image_centroids, text_centroids;
  for (std::size_t k = 0; k < cfg.num_labels; ++k) {
    image_centroids.push_back(draw_centroid(cfg.d_v));
    text_centroids.push_back(draw_centroid(cfg.d_t));
  }

  Dataset data;
  data.d_v = cfg.d_v;
  data.d_t = cfg.d_t;
  data.d_y = 0;
  for (std::size_t k = 0; k < cfg.num_labels; ++k) {
    data.label_names.push_back("label-" + std::to_string(k));
  }

  auto mean_feature = [&](const std::vector<Vector>& centroids,
                          const std::vector<int>& labels, std::size_t dim) {
    Vector f(dim, 0.0);
    for (int l : labels) {
      const Vector& c = centroids[static_cast<std::size_t>(l)];
      for (std::size_t i = 0; i < dim; ++i) f[i] += c[i];
    }
    const double inv = 1.0 / static_cast<double>(labels.size());
    for (double& x : f) x *= inv;
    for (double& x : f) x += cfg.noise_sigma * rng.normal();
    return f;
  };

  std::size_t counter = 0;
  for (std::size_t k = 0; k < cfg.num_labels; ++k) {
    for (std::size_t i = 0; i < cfg.per_label; ++i) {
      Instance inst;
      inst.id = "synth-" + std::to_string(counter++);
      inst.labels = {static_cast<int>(k)};
      if (cfg.multilabel_prob > 0.0 && rng.uniform() < cfg.multilabel_prob) {
        // one extra label distinct from the primary
        const std::size_t other = rng.index(cfg.num_labels - 1);
        const int extra = static_cast<int>(other >= k ? other + 1 : other);
        inst.labels.push_back(extra);
        std::sort(inst.labels.begin(), inst.labels.end());
      }
      inst.image_feat = mean_feature(image_centroids, inst.labels, cfg.d_v);
      inst.text_feat = mean_feature(text_centroids, inst.labels, cfg.d_t);
      data.instances.push_back(std::move(inst));
    }
  }
  data.validate();
  return data;
}

}  // namespace cmhash
