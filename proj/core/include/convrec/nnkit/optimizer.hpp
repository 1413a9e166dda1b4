// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "convrec/nnkit/tensor.hpp"

namespace convrec::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::size_t step = 0;
};

/// Adam over a fixed list of parameter tensors. The tensors must outlive the
/// optimizer and keep their shapes.
class Adam {
 public:
  explicit Adam(std::vector<Tensor*> params, AdamConfig config = {});

  /// One update with learning rate `lr`. Throws TrainingError (naming the
  /// parameter slot) if any gradient is non-finite; parameters are left
  /// untouched in that case.
  void step(std::span<const Tensor> grads, double lr);

  const OptimizerState& state() const noexcept { return state_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  std::vector<Tensor*> params_;
  AdamConfig config_;
  OptimizerState state_;
};

/// Half-cosine decay from lr_max at step 0 to lr_min at total_steps.
/// total_steps == 0 yields lr_max; step > total_steps throws std::out_of_range.
double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max, double lr_min);

}  // namespace convrec::nn
