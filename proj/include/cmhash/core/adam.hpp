#pragma once

#include <cmath>
#include <cstddef>

#include "cmhash/core/mlp.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

/// Per-encoder Adam moments. One state belongs to exactly one training run;
/// never step the same state from two threads.
struct AdamState {
  EncoderGrads first_moment;
  EncoderGrads second_moment;
  std::size_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState init(const EncoderParams& params) {
    AdamState s;
    s.first_moment = EncoderGrads::zeros_like(params);
    s.second_moment = EncoderGrads::zeros_like(params);
    return s;
  }
};

namespace detail {

inline void adam_update_span(std::span<double> param, std::span<const double> grad,
                             std::span<double> m, std::span<double> v,
                             double lr, double beta1, double beta2, double eps,
                             double m_corr, double v_corr) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    const double m_hat = m[i] / m_corr;
    const double v_hat = v[i] / v_corr;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

}  // namespace detail

/// Standard Adam update with bias correction. Mutates params and state.
inline void adam_step(EncoderParams& params, const EncoderGrads& grads,
                      AdamState& state, double lr) {
  if (lr <= 0.0) throw InputError("adam_step: learning rate must be positive");
  if (grads.layers.size() != params.layers.size()) {
    throw InputError("adam_step: gradient/parameter layer count mismatch");
  }
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    if (grads.layers[k].weight.rows != params.layers[k].weight.rows ||
        grads.layers[k].weight.cols != params.layers[k].weight.cols ||
        grads.layers[k].bias.size() != params.layers[k].bias.size()) {
      throw InputError("adam_step: gradient shape mismatch at layer " +
                       std::to_string(k));
    }
  }
  if (!grads.all_finite()) {
    throw NumericError("adam_step: non-finite gradient");
  }

  state.step_count += 1;
  const double m_corr = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double v_corr = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    detail::adam_update_span(params.layers[k].weight.data,
                             grads.layers[k].weight.data,
                             state.first_moment.layers[k].weight.data,
                             state.second_moment.layers[k].weight.data, lr,
                             state.beta1, state.beta2, state.epsilon, m_corr, v_corr);
    detail::adam_update_span(params.layers[k].bias, grads.layers[k].bias,
                             state.first_moment.layers[k].bias,
                             state.second_moment.layers[k].bias, lr, state.beta1,
                             state.beta2, state.epsilon, m_corr, v_corr);
  }
}

}  // namespace cmhash
