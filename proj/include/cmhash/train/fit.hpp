#pragma once

#include <span>
#include <vector>

#include "cmhash/core/adam.hpp"
#include "cmhash/core/mlp.hpp"
#include "cmhash/data/instance.hpp"
#include "cmhash/train/loss.hpp"

namespace cmhash {

/// Forward a list of already-gathered input vectors through one head,
/// keeping the traces for backprop.
inline Matrix encode_batch(const EncoderParams& head, std::span<const Vector> inputs,
                           std::vector<ForwardTrace>* traces = nullptr) {
  Matrix h(inputs.size(), head.output_dim());
  if (traces) {
    traces->clear();
    traces->reserve(inputs.size());
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    ForwardTrace trace = mlp_forward(head, inputs[i]);
    std::copy(trace.output().begin(), trace.output().end(), h.row(i).begin());
    if (traces) traces->push_back(std::move(trace));
  }
  return h;
}

/// Pairwise NLL over an instance subset without materializing the
/// similarity matrix; rows of h_a and h_b follow the order of ids.
inline double dataset_nll_sum(const Matrix& h_a, const Matrix& h_b, const Dataset& data,
                              std::span<const std::size_t> ids, bool include_self) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Instance& a = data.instances[ids[i]];
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (!include_self && i == j) continue;
      const int s = labels_overlap(a, data.instances[ids[j]]) ? 1 : 0;
      acc += nll_term(pair_similarity(h_a.row(i), h_b.row(j)), s);
    }
  }
  return acc;
}

/// One mini-batch optimizer step for a single trainee head.
///
/// The trainee's representations are paired against one or more fixed
/// partner output matrices (all sharing the in-batch similarity), plus the
/// binarization pull toward the batch rows of the unified codes. Partner
/// heads are not touched; call once per head-and-phase.
inline void fit_batch(EncoderParams& trainee, AdamState& opt,
                      std::span<const Vector> trainee_inputs,
                      std::span<const Matrix* const> partners,
                      const SimilarityMatrix& sim, const HashCodeMatrix& codes,
                      double quant_weight, double lr, bool include_self) {
  std::vector<ForwardTrace> traces;
  const Matrix h = encode_batch(trainee, trainee_inputs, &traces);

  Matrix dh(h.rows, h.cols);
  const Matrix sim_real = to_real(sim);
  for (const Matrix* partner : partners) {
    add_pair_similarity_grads(h, *partner, sim_real, include_self, &dh, nullptr);
  }
  if (quant_weight != 0.0) {
    add_quantization_grads(codes, h, quant_weight, dh);
  }

  EncoderGrads grads = EncoderGrads::zeros_like(trainee);
  for (std::size_t i = 0; i < trainee_inputs.size(); ++i) {
    Vector row(dh.row(i).begin(), dh.row(i).end());
    auto [g, input_grad] = mlp_backward(trainee, traces[i], row);
    (void)input_grad;
    grads.add(g);
  }
  adam_step(trainee, grads, opt, lr);
}

/// Splits a shuffled index order into contiguous batches.
inline std::vector<std::vector<std::size_t>> make_batches(
    std::span<const std::size_t> order, std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, order.size());
    batches.emplace_back(order.begin() + begin, order.begin() + end);
  }
  return batches;
}

/// Extracts the rows of `codes` belonging to the batch members, where
/// `positions[i]` is the row of train-set member i in `codes`.
inline HashCodeMatrix gather_code_rows(const HashCodeMatrix& codes,
                                       std::span<const std::size_t> positions) {
  HashCodeMatrix out(positions.size(), codes.bits());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = 0; j < codes.bits(); ++j) {
      out.set(i, j, codes.get(positions[i], j));
    }
  }
  return out;
}

}  // namespace cmhash
