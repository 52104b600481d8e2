#pragma once

#include <cstdint>
#include <vector>

#include "cmhash/core/mlp.hpp"
#include "cmhash/data/prompts.hpp"
#include "cmhash/error.hpp"

namespace cmhash {

struct TrainConfig {
  std::size_t code_length = 16;
  double alpha = 1.0;
  double beta = 1.0;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden_dims{512};
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;
  LabelInputMode label_mode = LabelInputMode::multihot;
  bool include_self_pairs = true;

  void validate() const {
    if (code_length == 0 || code_length > 512) {
      throw InputError("config: code length must be in [1, 512]");
    }
    if (alpha < 0.0) throw InputError("config: alpha must be nonnegative");
    if (beta < 0.0) throw InputError("config: beta must be nonnegative");
    if (learning_rate <= 0.0) throw InputError("config: learning rate must be positive");
    if (batch_size < 2) throw InputError("config: batch size must be at least 2");
    if (epochs < 1) throw InputError("config: epochs must be at least 1");
  }
};

}  // namespace cmhash
