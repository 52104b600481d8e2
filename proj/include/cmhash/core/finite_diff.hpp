#pragma once

#include <cmath>
#include <functional>

#include "cmhash/core/mlp.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

/// Central-difference gradient of a scalar loss over every encoder
/// coordinate: (loss(p + eps) - loss(p - eps)) / (2 eps).
///
/// This is the testing oracle for every analytic gradient in the library;
/// it must stay independent of the backprop path it is used to check.
inline EncoderGrads finite_diff_grad(
    const std::function<double(const EncoderParams&)>& loss_fn,
    EncoderParams params, double eps) {
  if (eps <= 0.0) throw InputError("finite_diff_grad: eps must be positive");

  EncoderGrads grads = EncoderGrads::zeros_like(params);
  const double inv = 1.0 / (2.0 * eps);

  auto probe = [&](double& coord, double& out) {
    const double saved = coord;
    coord = saved + eps;
    const double up = loss_fn(params);
    coord = saved - eps;
    const double down = loss_fn(params);
    coord = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_diff_grad: loss non-finite at probe point");
    }
    out = (up - down) * inv;
  };

  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    for (std::size_t i = 0; i < params.layers[k].weight.data.size(); ++i) {
      probe(params.layers[k].weight.data[i], grads.layers[k].weight.data[i]);
    }
    for (std::size_t i = 0; i < params.layers[k].bias.size(); ++i) {
      probe(params.layers[k].bias[i], grads.layers[k].bias[i]);
    }
  }
  return grads;
}

/// Worst relative disagreement between two gradient sets, with a floor on
/// the denominator so near-zero coordinates do not dominate.
inline double max_relative_error(const EncoderGrads& a, const EncoderGrads& b,
                                 double floor = 1e-6) {
  double worst = 0.0;
  auto scan = [&](std::span<const double> xs, std::span<const double> ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double denom = std::max({std::abs(xs[i]), std::abs(ys[i]), floor});
      worst = std::max(worst, std::abs(xs[i] - ys[i]) / denom);
    }
  };
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    scan(a.layers[k].weight.data, b.layers[k].weight.data);
    scan(a.layers[k].bias, b.layers[k].bias);
  }
  return worst;
}

}  // namespace cmhash
