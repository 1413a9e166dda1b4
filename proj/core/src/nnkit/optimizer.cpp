// SPDX-License-Identifier: Apache-2.0
#include "convrec/nnkit/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "convrec/errors.hpp"

namespace convrec::nn {

Adam::Adam(std::vector<Tensor*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  for (const Tensor* p : params_) {
    state_.first_moment.emplace_back(p->shape());
    state_.second_moment.emplace_back(p->shape());
  }
}

void Adam::step(std::span<const Tensor> grads, double lr) {
  if (grads.size() != params_.size()) {
    throw UsageError("adam: got " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params_.size()) + " parameters");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].size() != params_[i]->size()) {
      throw UsageError("adam: gradient " + std::to_string(i) + " has shape " +
                       shape_string(grads[i].shape()) + ", parameter has " +
                       shape_string(params_[i]->shape()));
    }
    const double* g = grads[i].data();
    for (std::size_t j = 0; j < grads[i].size(); ++j) {
      if (!std::isfinite(g[j])) {
        throw TrainingError("adam: non-finite gradient " + std::to_string(g[j]) +
                            " in parameter slot " + std::to_string(i) + " at element " +
                            std::to_string(j) + " (step " + std::to_string(state_.step + 1) +
                            ")");
      }
    }
  }

  ++state_.step;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(state_.step);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    double* p = params_[i]->data();
    double* m = state_.first_moment[i].data();
    double* v = state_.second_moment[i].data();
    const double* g = grads[i].data();
    for (std::size_t j = 0; j < grads[i].size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      p[j] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max, double lr_min) {
  if (total_steps == 0) return lr_max;
  if (step > total_steps) {
    throw std::out_of_range("cosine_lr: step " + std::to_string(step) + " beyond " +
                            std::to_string(total_steps));
  }
  if (step == total_steps) return lr_min;
  const double phase = static_cast<double>(step) / static_cast<double>(total_steps);
  return lr_min + (lr_max - lr_min) * 0.5 * (1.0 + std::cos(std::numbers::pi * phase));
}

}  // namespace convrec::nn
