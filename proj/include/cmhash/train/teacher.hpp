#pragma once

#include <numeric>
#include <utility>
#include <vector>

#include "cmhash/core/adam.hpp"
#include "cmhash/core/rng.hpp"
#include "cmhash/data/split.hpp"
#include "cmhash/train/config.hpp"
#include "cmhash/train/encode.hpp"
#include "cmhash/train/fit.hpp"

namespace cmhash {

/// Stage one result: image and label heads aligned into a common Hamming
/// space, plus the unified codes over the train set.
struct TeacherState {
  EncoderParams image_params;
  EncoderParams label_params;
  HashCodeMatrix codes;  // unified codes, one row per train-set member
  double alpha = 1.0;
  std::size_t code_length = 0;
  std::uint64_t seed = 0;
  std::vector<double> loss_history;  // [0] is the pre-training loss
  TrainConfig config;
};

/// A small two-modality batch, used directly by the gradient checks.
struct PairBatch {
  std::vector<Vector> a_inputs;
  std::vector<Vector> b_inputs;
  SimilarityMatrix sim;   // |a| x |b|
  HashCodeMatrix codes;   // unified codes of the batch members
};

inline double teacher_batch_loss(const EncoderParams& image_head,
                                 const EncoderParams& label_head,
                                 const PairBatch& batch, double alpha,
                                 bool include_self = true) {
  const Matrix h_v = encode_batch(image_head, batch.a_inputs);
  const Matrix h_y = encode_batch(label_head, batch.b_inputs);
  return teacher_loss(h_v, h_y, batch.sim, batch.codes, alpha, include_self);
}

/// Analytic gradients of the stage objective for both heads.
inline std::pair<EncoderGrads, EncoderGrads> teacher_grads(
    const EncoderParams& image_head, const EncoderParams& label_head,
    const PairBatch& batch, double alpha, bool include_self = true) {
  std::vector<ForwardTrace> traces_v, traces_y;
  const Matrix h_v = encode_batch(image_head, batch.a_inputs, &traces_v);
  const Matrix h_y = encode_batch(label_head, batch.b_inputs, &traces_y);

  Matrix dh_v(h_v.rows, h_v.cols), dh_y(h_y.rows, h_y.cols);
  add_pair_similarity_grads(h_v, h_y, to_real(batch.sim), include_self, &dh_v, &dh_y);
  if (alpha != 0.0) {
    add_quantization_grads(batch.codes, h_v, alpha, dh_v);
    add_quantization_grads(batch.codes, h_y, alpha, dh_y);
  }

  EncoderGrads grads_v = EncoderGrads::zeros_like(image_head);
  for (std::size_t i = 0; i < batch.a_inputs.size(); ++i) {
    Vector row(dh_v.row(i).begin(), dh_v.row(i).end());
    grads_v.add(mlp_backward(image_head, traces_v[i], row).first);
  }
  EncoderGrads grads_y = EncoderGrads::zeros_like(label_head);
  for (std::size_t j = 0; j < batch.b_inputs.size(); ++j) {
    Vector row(dh_y.row(j).begin(), dh_y.row(j).end());
    grads_y.add(mlp_backward(label_head, traces_y[j], row).first);
  }
  return {std::move(grads_v), std::move(grads_y)};
}

namespace detail {

inline std::vector<Vector> gather_inputs(const Dataset& data,
                                         std::span<const std::size_t> ids, Modality m,
                                         LabelInputMode label_mode) {
  std::vector<Vector> inputs;
  inputs.reserve(ids.size());
  for (std::size_t idx : ids) inputs.push_back(modality_input(data, idx, m, label_mode));
  return inputs;
}

inline std::vector<Vector> gather_rows(const std::vector<Vector>& all,
                                       std::span<const std::size_t> positions) {
  std::vector<Vector> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(all[p]);
  return out;
}

inline std::vector<std::size_t> gather_ids(std::span<const std::size_t> train,
                                           std::span<const std::size_t> positions) {
  std::vector<std::size_t> ids;
  ids.reserve(positions.size());
  for (std::size_t p : positions) ids.push_back(train[p]);
  return ids;
}

inline std::size_t label_head_input_dim(const Dataset& data, LabelInputMode mode) {
  if (mode == LabelInputMode::multihot) return data.num_labels();
  if (data.d_y == 0) {
    throw InputError("prompt_feat label mode requires label prompt features");
  }
  return data.d_y;
}

}  // namespace detail

/// Alternating mini-batch optimization of the image and label heads: per
/// epoch, one pass of Adam steps for the image head against the current
/// label head, one for the label head against the updated image head, then
/// a full-train-set refresh of the unified codes and the recorded loss.
inline TeacherState train_teacher(const Dataset& data, const SplitSpec& split,
                                  const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  split.validate(data);
  if (split.train.empty()) throw InputError("train_teacher: empty train set");

  TeacherState state;
  state.alpha = cfg.alpha;
  state.code_length = cfg.code_length;
  state.seed = cfg.seed;
  state.config = cfg;

  Rng init_rng(derive_seed(cfg.seed, 0x7ea));
  state.image_params =
      make_encoder(data.d_v, cfg.hidden_dims, cfg.code_length, cfg.hidden_activation,
                   cfg.output_activation, init_rng);
  state.label_params =
      make_encoder(detail::label_head_input_dim(data, cfg.label_mode), cfg.hidden_dims,
                   cfg.code_length, cfg.hidden_activation, cfg.output_activation,
                   init_rng);

  const std::vector<Vector> image_inputs =
      detail::gather_inputs(data, split.train, Modality::image, cfg.label_mode);
  const std::vector<Vector> label_inputs =
      detail::gather_inputs(data, split.train, Modality::label, cfg.label_mode);

  auto full_loss = [&](const Matrix& h_v, const Matrix& h_y, const HashCodeMatrix& b) {
    double loss = dataset_nll_sum(h_v, h_y, data, split.train, cfg.include_self_pairs);
    if (cfg.alpha != 0.0) {
      loss += cfg.alpha * (quantization_sum(b, h_v) + quantization_sum(b, h_y));
    }
    return loss;
  };

  Matrix h_v = encode_batch(state.image_params, image_inputs);
  Matrix h_y = encode_batch(state.label_params, label_inputs);
  state.codes = unified_codes(h_v, h_y);
  state.loss_history.push_back(full_loss(h_v, h_y, state.codes));

  AdamState opt_v = AdamState::init(state.image_params);
  AdamState opt_y = AdamState::init(state.label_params);
  Rng shuffle_rng(derive_seed(cfg.seed, 0x5f1));

  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    const auto batches = make_batches(order, cfg.batch_size);

    for (int phase = 0; phase < 2; ++phase) {
      for (const auto& batch : batches) {
        const auto batch_ids = detail::gather_ids(split.train, batch);
        const SimilarityMatrix sim = build_similarity(data, batch_ids, batch_ids);
        const HashCodeMatrix batch_codes = gather_code_rows(state.codes, batch);
        if (phase == 0) {
          const Matrix partner = encode_batch(
              state.label_params, detail::gather_rows(label_inputs, batch));
          const Matrix* partners[] = {&partner};
          fit_batch(state.image_params, opt_v, detail::gather_rows(image_inputs, batch),
                    partners, sim, batch_codes, cfg.alpha, cfg.learning_rate,
                    cfg.include_self_pairs);
        } else {
          const Matrix partner = encode_batch(
              state.image_params, detail::gather_rows(image_inputs, batch));
          const Matrix* partners[] = {&partner};
          fit_batch(state.label_params, opt_y, detail::gather_rows(label_inputs, batch),
                    partners, sim, batch_codes, cfg.alpha, cfg.learning_rate,
                    cfg.include_self_pairs);
        }
      }
    }

    h_v = encode_batch(state.image_params, image_inputs);
    h_y = encode_batch(state.label_params, label_inputs);
    state.codes = unified_codes(h_v, h_y);
    const double loss = full_loss(h_v, h_y, state.codes);
    if (!std::isfinite(loss)) {
      throw NumericError("train_teacher: loss diverged at epoch " + std::to_string(epoch));
    }
    state.loss_history.push_back(loss);
  }
  return state;
}

}  // namespace cmhash
