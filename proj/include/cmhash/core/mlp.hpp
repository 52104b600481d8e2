#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cmhash/core/linalg.hpp"
#include "cmhash/core/rng.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

enum class Activation { relu, identity, tanh };

inline std::string activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
  }
  throw InputError("unknown activation tag");
}

inline Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  throw InputError("unknown activation name: " + name);
}

inline double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::identity: return x;
    case Activation::tanh: return std::tanh(x);
  }
  return x;
}

/// Derivative at pre-activation x, given the already-computed output y.
inline double activation_grad(Activation a, double x, double y) {
  switch (a) {
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::identity: return 1.0;
    case Activation::tanh: return 1.0 - y * y;
  }
  return 1.0;
}

/// One fully-connected layer: y = act(W x + b), W is out_dim x in_dim.
struct DenseLayer {
  Matrix weight;
  Vector bias;
  Activation activation = Activation::identity;

  std::size_t in_dim() const { return weight.cols; }
  std::size_t out_dim() const { return weight.rows; }
};

/// A hashing head: a small stack of fully-connected layers mapping a feature
/// vector to a real-valued code of length output_dim().
struct EncoderParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.back().out_dim(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.data.size() + l.bias.size();
    return n;
  }

  /// Checks layer dimension chaining and finiteness of all entries.
  void validate() const {
    if (layers.empty()) throw InputError("encoder has no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const DenseLayer& l = layers[k];
      if (l.weight.rows == 0 || l.weight.cols == 0) {
        throw InputError("encoder layer " + std::to_string(k) + " has empty weight");
      }
      if (l.bias.size() != l.out_dim()) {
        throw InputError("encoder layer " + std::to_string(k) + " bias size mismatch");
      }
      if (k + 1 < layers.size() && l.out_dim() != layers[k + 1].in_dim()) {
        throw InputError("encoder layers " + std::to_string(k) + "/" +
                         std::to_string(k + 1) + " dimension chain broken");
      }
      ensure_finite(l.weight.data, "encoder layer " + std::to_string(k) + " weight");
      ensure_finite(l.bias, "encoder layer " + std::to_string(k) + " bias");
    }
  }
};

/// Records every intermediate value of one forward pass.
/// post_activations[0] is the input; post_activations[k+1] = act(pre_activations[k]).
struct ForwardTrace {
  std::vector<Vector> pre_activations;
  std::vector<Vector> post_activations;

  const Vector& output() const { return post_activations.back(); }
};

/// Gradient (or optimizer-moment) container mirroring an encoder's shape.
struct LayerGrads {
  Matrix weight;
  Vector bias;
};

struct EncoderGrads {
  std::vector<LayerGrads> layers;

  static EncoderGrads zeros_like(const EncoderParams& params) {
    EncoderGrads g;
    g.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) {
      g.layers.push_back({Matrix(l.weight.rows, l.weight.cols), Vector(l.bias.size(), 0.0)});
    }
    return g;
  }

  void add(const EncoderGrads& other) {
    for (std::size_t k = 0; k < layers.size(); ++k) {
      for (std::size_t i = 0; i < layers[k].weight.data.size(); ++i) {
        layers[k].weight.data[i] += other.layers[k].weight.data[i];
      }
      for (std::size_t i = 0; i < layers[k].bias.size(); ++i) {
        layers[k].bias[i] += other.layers[k].bias[i];
      }
    }
  }

  bool all_finite() const {
    for (const auto& l : layers) {
      if (!cmhash::all_finite(l.weight.data) || !cmhash::all_finite(l.bias)) return false;
    }
    return true;
  }
};

inline ForwardTrace mlp_forward(const EncoderParams& params, const Vector& input) {
  params.validate();
  if (input.size() != params.input_dim()) {
    throw InputError("mlp_forward: input length " + std::to_string(input.size()) +
                     " does not match encoder input dim " +
                     std::to_string(params.input_dim()));
  }
  ensure_finite(input, "mlp_forward input");

  ForwardTrace trace;
  trace.pre_activations.reserve(params.layers.size());
  trace.post_activations.reserve(params.layers.size() + 1);
  trace.post_activations.push_back(input);

  for (const DenseLayer& layer : params.layers) {
    const Vector& x = trace.post_activations.back();
    Vector pre(layer.out_dim());
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      pre[r] = layer.bias[r] + dot(layer.weight.row(r), x);
    }
    Vector post(layer.out_dim());
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      post[r] = apply_activation(layer.activation, pre[r]);
    }
    trace.pre_activations.push_back(std::move(pre));
    trace.post_activations.push_back(std::move(post));
  }
  ensure_finite(trace.output(), "mlp_forward output");
  return trace;
}

/// Backpropagates output_grad through the trace. Returns gradients for every
/// layer plus the gradient with respect to the input vector.
inline std::pair<EncoderGrads, Vector> mlp_backward(const EncoderParams& params,
                                                    const ForwardTrace& trace,
                                                    const Vector& output_grad) {
  if (output_grad.size() != params.output_dim()) {
    throw InputError("mlp_backward: output_grad length mismatch");
  }
  if (trace.pre_activations.size() != params.layers.size() ||
      trace.post_activations.size() != params.layers.size() + 1) {
    throw InputError("mlp_backward: trace does not match encoder topology");
  }

  EncoderGrads grads = EncoderGrads::zeros_like(params);
  Vector delta = output_grad;

  for (std::size_t k = params.layers.size(); k-- > 0;) {
    const DenseLayer& layer = params.layers[k];
    const Vector& pre = trace.pre_activations[k];
    const Vector& post = trace.post_activations[k + 1];
    const Vector& x = trace.post_activations[k];

    // delta <- dL/d(pre-activation)
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      delta[r] *= activation_grad(layer.activation, pre[r], post[r]);
    }

    LayerGrads& lg = grads.layers[k];
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      lg.bias[r] = delta[r];
      for (std::size_t c = 0; c < layer.in_dim(); ++c) {
        lg.weight(r, c) = delta[r] * x[c];
      }
    }

    Vector prev(layer.in_dim(), 0.0);
    for (std::size_t r = 0; r < layer.out_dim(); ++r) {
      for (std::size_t c = 0; c < layer.in_dim(); ++c) {
        prev[c] += delta[r] * layer.weight(r, c);
      }
    }
    delta = std::move(prev);
  }
  return {std::move(grads), std::move(delta)};
}

/// Builds an encoder with uniform fan-in initialization in
/// [-1/sqrt(in_dim), +1/sqrt(in_dim)].
inline EncoderParams make_encoder(std::size_t in_dim,
                                  const std::vector<std::size_t>& hidden_dims,
                                  std::size_t out_dim, Activation hidden_activation,
                                  Activation output_activation, Rng& rng) {
  if (in_dim == 0 || out_dim == 0) {
    throw InputError("make_encoder: dimensions must be positive");
  }
  std::vector<std::size_t> dims;
  dims.push_back(in_dim);
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw InputError("make_encoder: hidden dim must be positive");
    dims.push_back(h);
  }
  dims.push_back(out_dim);

  EncoderParams params;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    DenseLayer layer;
    layer.weight = Matrix(dims[k + 1], dims[k]);
    layer.bias = Vector(dims[k + 1], 0.0);
    layer.activation =
        (k + 2 == dims.size()) ? output_activation : hidden_activation;
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[k]));
    for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace cmhash
