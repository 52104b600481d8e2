#pragma once

#include <numeric>
#include <utility>
#include <vector>

#include "cmhash/train/teacher.hpp"

namespace cmhash {

/// Stage two result: text head fitted to the frozen image Hamming space.
struct StudentState {
  EncoderParams text_params;
  EncoderParams image_params;  // bit-identical copy of the teacher's head
  HashCodeMatrix codes;        // unified codes over the train set
  double beta = 1.0;
  std::size_t code_length = 0;
  std::uint64_t seed = 0;
  std::vector<double> loss_history;  // [0] is the pre-training loss
  TrainConfig config;
};

/// Objective of a fitting stage: pairwise NLL between frozen and trainee
/// representations plus the weighted binarization gaps of both, including
/// the frozen side's gap (constant in the trainee parameters, but part of
/// the reported value).
inline double student_batch_loss(const Matrix& frozen_h, const EncoderParams& trainee,
                                 std::span<const Vector> trainee_inputs,
                                 const SimilarityMatrix& sim, const HashCodeMatrix& codes,
                                 double beta, bool include_self = true) {
  const Matrix h_t = encode_batch(trainee, trainee_inputs);
  return teacher_loss(frozen_h, h_t, sim, codes, beta, include_self);
}

/// Gradients of the fitting objective with respect to the trainee head
/// only; the frozen side receives none by construction.
inline EncoderGrads student_grads(const Matrix& frozen_h, const EncoderParams& trainee,
                                  std::span<const Vector> trainee_inputs,
                                  const SimilarityMatrix& sim, const HashCodeMatrix& codes,
                                  double beta, bool include_self = true) {
  std::vector<ForwardTrace> traces;
  const Matrix h_t = encode_batch(trainee, trainee_inputs, &traces);

  Matrix dh_t(h_t.rows, h_t.cols);
  add_pair_similarity_grads(frozen_h, h_t, to_real(sim), include_self, nullptr, &dh_t);
  if (beta != 0.0) add_quantization_grads(codes, h_t, beta, dh_t);

  EncoderGrads grads = EncoderGrads::zeros_like(trainee);
  for (std::size_t i = 0; i < trainee_inputs.size(); ++i) {
    Vector row(dh_t.row(i).begin(), dh_t.row(i).end());
    grads.add(mlp_backward(trainee, traces[i], row).first);
  }
  return grads;
}

namespace detail {

struct FitStageResult {
  EncoderParams params;
  HashCodeMatrix codes;
  std::vector<double> loss_history;
};

/// Mini-batch Adam on one trainee head against a frozen partner's full
/// train-set outputs. Unified codes refresh at every epoch end.
inline FitStageResult fit_to_frozen(const Dataset& data, std::span<const std::size_t> train,
                                    const Matrix& frozen_h, EncoderParams trainee,
                                    Modality trainee_modality, const TrainConfig& cfg,
                                    double quant_weight, std::uint64_t shuffle_seed) {
  const std::vector<Vector> trainee_inputs =
      gather_inputs(data, train, trainee_modality, cfg.label_mode);

  FitStageResult stage;
  stage.params = std::move(trainee);

  auto full_loss = [&](const Matrix& h_t, const HashCodeMatrix& b) {
    double loss = dataset_nll_sum(frozen_h, h_t, data, train, cfg.include_self_pairs);
    if (quant_weight != 0.0) {
      loss += quant_weight * (quantization_sum(b, frozen_h) + quantization_sum(b, h_t));
    }
    return loss;
  };

  Matrix h_t = encode_batch(stage.params, trainee_inputs);
  stage.codes = unified_codes(frozen_h, h_t);
  stage.loss_history.push_back(full_loss(h_t, stage.codes));

  AdamState opt = AdamState::init(stage.params);
  Rng shuffle_rng(shuffle_seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (const auto& batch : make_batches(order, cfg.batch_size)) {
      const auto batch_ids = gather_ids(train, batch);
      const SimilarityMatrix sim = build_similarity(data, batch_ids, batch_ids);
      const HashCodeMatrix batch_codes = gather_code_rows(stage.codes, batch);

      Matrix partner(batch.size(), frozen_h.cols);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        std::copy(frozen_h.row(batch[i]).begin(), frozen_h.row(batch[i]).end(),
                  partner.row(i).begin());
      }
      const Matrix* partners[] = {&partner};
      fit_batch(stage.params, opt, gather_rows(trainee_inputs, batch), partners, sim,
                batch_codes, quant_weight, cfg.learning_rate, cfg.include_self_pairs);
    }

    h_t = encode_batch(stage.params, trainee_inputs);
    stage.codes = unified_codes(frozen_h, h_t);
    const double loss = full_loss(h_t, stage.codes);
    if (!std::isfinite(loss)) {
      throw NumericError("fitting stage: loss diverged at epoch " + std::to_string(epoch));
    }
    stage.loss_history.push_back(loss);
  }
  return stage;
}

}  // namespace detail

/// Trains the text head against the teacher's frozen image head. The image
/// head (not just its binarized codes) stays fixed: its continuous outputs
/// enter the pairwise terms and the unified codes, but it receives no
/// updates.
inline StudentState train_student(const Dataset& data, const SplitSpec& split,
                                  const TeacherState& teacher, const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  split.validate(data);
  if (split.train.empty()) throw InputError("train_student: empty train set");
  if (cfg.code_length != teacher.code_length) {
    throw InputError("train_student: config code length " +
                     std::to_string(cfg.code_length) + " != teacher code length " +
                     std::to_string(teacher.code_length));
  }

  StudentState state;
  state.image_params = teacher.image_params;
  state.beta = cfg.beta;
  state.code_length = cfg.code_length;
  state.seed = cfg.seed;
  state.config = cfg;

  Rng init_rng(derive_seed(cfg.seed, 0x57d));
  EncoderParams text_head =
      make_encoder(data.d_t, cfg.hidden_dims, cfg.code_length, cfg.hidden_activation,
                   cfg.output_activation, init_rng);

  // frozen image outputs over the train set, computed once
  const std::vector<Vector> image_inputs =
      detail::gather_inputs(data, split.train, Modality::image, cfg.label_mode);
  const Matrix frozen_h_v = encode_batch(state.image_params, image_inputs);

  auto stage = detail::fit_to_frozen(data, split.train, frozen_h_v, std::move(text_head),
                                     Modality::text, cfg, cfg.beta,
                                     derive_seed(cfg.seed, 0x57f));
  state.text_params = std::move(stage.params);
  state.codes = std::move(stage.codes);
  state.loss_history = std::move(stage.loss_history);
  return state;
}

/// Joint-label ablation variant. Stage one narrows the label modality's gap
/// to image and text synchronously (all three heads train; the pairwise
/// terms are label-image and label-text, equally weighted). Stage two
/// freezes the label head and fits the image and text heads to its Hamming
/// space.
struct AblationState {
  EncoderParams image_params;
  EncoderParams text_params;
  EncoderParams label_params;
  HashCodeMatrix codes;  // stage-one unified codes over the train set
  std::size_t code_length = 0;
  std::uint64_t seed = 0;
  std::vector<double> stage1_loss_history;
  std::vector<double> stage2_image_loss_history;
  std::vector<double> stage2_text_loss_history;
  TrainConfig config;
};

/// Stage one of the ablation: joint three-head training.
inline AblationState train_ablation_stage1(const Dataset& data, const SplitSpec& split,
                                           const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  split.validate(data);
  if (split.train.empty()) throw InputError("train_ablation: empty train set");

  AblationState state;
  state.code_length = cfg.code_length;
  state.seed = cfg.seed;
  state.config = cfg;

  Rng init_rng(derive_seed(cfg.seed, 0xab1));
  state.image_params =
      make_encoder(data.d_v, cfg.hidden_dims, cfg.code_length, cfg.hidden_activation,
                   cfg.output_activation, init_rng);
  state.text_params =
      make_encoder(data.d_t, cfg.hidden_dims, cfg.code_length, cfg.hidden_activation,
                   cfg.output_activation, init_rng);
  state.label_params =
      make_encoder(detail::label_head_input_dim(data, cfg.label_mode), cfg.hidden_dims,
                   cfg.code_length, cfg.hidden_activation, cfg.output_activation,
                   init_rng);

  const std::vector<Vector> image_inputs =
      detail::gather_inputs(data, split.train, Modality::image, cfg.label_mode);
  const std::vector<Vector> text_inputs =
      detail::gather_inputs(data, split.train, Modality::text, cfg.label_mode);
  const std::vector<Vector> label_inputs =
      detail::gather_inputs(data, split.train, Modality::label, cfg.label_mode);

  auto stage1_loss = [&](const Matrix& h_v, const Matrix& h_t, const Matrix& h_y,
                         const HashCodeMatrix& b) {
    double loss = dataset_nll_sum(h_v, h_y, data, split.train, cfg.include_self_pairs) +
                  dataset_nll_sum(h_t, h_y, data, split.train, cfg.include_self_pairs);
    if (cfg.alpha != 0.0) {
      loss += cfg.alpha * (quantization_sum(b, h_v) + quantization_sum(b, h_t) +
                           quantization_sum(b, h_y));
    }
    return loss;
  };

  Matrix h_v = encode_batch(state.image_params, image_inputs);
  Matrix h_t = encode_batch(state.text_params, text_inputs);
  Matrix h_y = encode_batch(state.label_params, label_inputs);
  state.codes = unified_codes(h_v, h_t, h_y);
  state.stage1_loss_history.push_back(stage1_loss(h_v, h_t, h_y, state.codes));

  AdamState opt_v = AdamState::init(state.image_params);
  AdamState opt_t = AdamState::init(state.text_params);
  AdamState opt_y = AdamState::init(state.label_params);
  Rng shuffle_rng(derive_seed(cfg.seed, 0xab2));
  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    const auto batches = make_batches(order, cfg.batch_size);

    for (int phase = 0; phase < 3; ++phase) {
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
        } else if (phase == 1) {
          const Matrix partner = encode_batch(
              state.label_params, detail::gather_rows(label_inputs, batch));
          const Matrix* partners[] = {&partner};
          fit_batch(state.text_params, opt_t, detail::gather_rows(text_inputs, batch),
                    partners, sim, batch_codes, cfg.alpha, cfg.learning_rate,
                    cfg.include_self_pairs);
        } else {
          const Matrix partner_v = encode_batch(
              state.image_params, detail::gather_rows(image_inputs, batch));
          const Matrix partner_t = encode_batch(
              state.text_params, detail::gather_rows(text_inputs, batch));
          const Matrix* partners[] = {&partner_v, &partner_t};
          fit_batch(state.label_params, opt_y, detail::gather_rows(label_inputs, batch),
                    partners, sim, batch_codes, cfg.alpha, cfg.learning_rate,
                    cfg.include_self_pairs);
        }
      }
    }

    h_v = encode_batch(state.image_params, image_inputs);
    h_t = encode_batch(state.text_params, text_inputs);
    h_y = encode_batch(state.label_params, label_inputs);
    state.codes = unified_codes(h_v, h_t, h_y);
    const double loss = stage1_loss(h_v, h_t, h_y, state.codes);
    if (!std::isfinite(loss)) {
      throw NumericError("train_ablation: loss diverged at epoch " +
                         std::to_string(epoch));
    }
    state.stage1_loss_history.push_back(loss);
  }
  return state;
}

/// Stage two of the ablation: the label head is frozen and the image and
/// text heads (warm-started from stage one) fit its Hamming space.
inline AblationState train_ablation_stage2(const Dataset& data, const SplitSpec& split,
                                           AblationState state, const TrainConfig& cfg) {
  const std::vector<Vector> label_inputs =
      detail::gather_inputs(data, split.train, Modality::label, cfg.label_mode);
  const Matrix frozen_h_y = encode_batch(state.label_params, label_inputs);

  auto image_stage = detail::fit_to_frozen(data, split.train, frozen_h_y,
                                           state.image_params, Modality::image, cfg,
                                           cfg.beta, derive_seed(cfg.seed, 0xab3));
  auto text_stage = detail::fit_to_frozen(data, split.train, frozen_h_y,
                                          state.text_params, Modality::text, cfg,
                                          cfg.beta, derive_seed(cfg.seed, 0xab4));
  state.image_params = std::move(image_stage.params);
  state.text_params = std::move(text_stage.params);
  state.stage2_image_loss_history = std::move(image_stage.loss_history);
  state.stage2_text_loss_history = std::move(text_stage.loss_history);
  return state;
}

inline AblationState train_ablation(const Dataset& data, const SplitSpec& split,
                                    const TrainConfig& cfg) {
  return train_ablation_stage2(data, split, train_ablation_stage1(data, split, cfg), cfg);
}

}  // namespace cmhash
