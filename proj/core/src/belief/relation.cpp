// SPDX-License-Identifier: Apache-2.0
#include "convrec/belief/relation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convrec/errors.hpp"

namespace convrec::belief {

RelationMatrix RelationMatrix::from_raw(std::span<const double> raw, std::size_t num_attributes) {
  const std::size_t n = num_attributes;
  if (raw.size() != n * n) {
    throw ConfigError("relation output has " + std::to_string(raw.size()) + " values, expected " +
                      std::to_string(n * n));
  }
  RelationMatrix m;
  m.n_ = n;
  m.values_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.values_[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (raw[i * n + j] + raw[j * n + i]);
      m.values_[i * n + j] = v;
      m.values_[j * n + i] = v;
    }
  }
  return m;
}

RelationMatrix RelationMatrix::average(std::span<const RelationMatrix> matrices) {
  if (matrices.empty()) throw UsageError("cannot average zero relation matrices");
  RelationMatrix out;
  out.n_ = matrices.front().n_;
  out.values_.assign(out.n_ * out.n_, 0.0);
  for (const auto& m : matrices) {
    if (m.n_ != out.n_) throw ConfigError("relation matrices differ in size");
    for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] += m.values_[i];
  }
  const double inv = 1.0 / static_cast<double>(matrices.size());
  for (double& v : out.values_) v *= inv;
  return out;
}

std::vector<double> raw_beliefs(const RelationMatrix& relation, std::span<const double> feedback) {
  const std::size_t n = relation.size();
  if (feedback.size() != n) {
    throw ConfigError("feedback vector has " + std::to_string(feedback.size()) +
                      " entries, relation matrix is " + std::to_string(n) + "x" +
                      std::to_string(n));
  }
  std::vector<double> q(n, 0.0);
  const auto a = relation.values();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * feedback[j];
    q[i] = acc;
  }
  return q;
}

std::vector<double> predict_beliefs(const RelationMatrix& relation,
                                    std::span<const double> feedback) {
  auto q = raw_beliefs(relation, feedback);
  for (double& v : q) v = std::clamp(v, 0.0, 1.0);
  return q;
}

std::vector<double> relation_gradient_to_raw(std::span<const double> grad_relation,
                                             std::size_t num_attributes) {
  const std::size_t n = num_attributes;
  if (grad_relation.size() != n * n) throw ConfigError("relation gradient has the wrong size");
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) out[i * n + j] = 0.5 * (grad_relation[i * n + j] + grad_relation[j * n + i]);
    }
  }
  return out;
}

double attribute_loss(std::span<const double> beliefs, std::span<const double> attributes) {
  if (beliefs.size() != attributes.size()) {
    throw ConfigError("belief and attribute vectors differ in length");
  }
  double loss = 0.0;
  for (std::size_t p = 0; p < beliefs.size(); ++p) {
    const double q = std::clamp(beliefs[p], kLossEpsilon, 1.0 - kLossEpsilon);
    loss -= attributes[p] * std::log(q) + (1.0 - attributes[p]) * std::log(1.0 - q);
  }
  return loss;
}

double attribute_loss(std::span<const std::vector<double>> beliefs,
                      std::span<const std::vector<double>> attributes) {
  if (beliefs.size() != attributes.size()) throw ConfigError("batch sizes differ");
  if (beliefs.empty()) throw UsageError("attribute loss over an empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < beliefs.size(); ++i) total += attribute_loss(beliefs[i], attributes[i]);
  return total / static_cast<double>(beliefs.size());
}

std::vector<double> attribute_loss_gradient(std::span<const double> raw,
                                            std::span<const double> attributes, double clip) {
  if (raw.size() != attributes.size()) {
    throw ConfigError("belief and attribute vectors differ in length");
  }
  std::vector<double> g(raw.size(), 0.0);
  for (std::size_t p = 0; p < raw.size(); ++p) {
    const double q = std::clamp(raw[p], kLossEpsilon, 1.0 - kLossEpsilon);
    const double b = attributes[p];
    const double d = (q - b) / (q * (1.0 - q));
    const bool below = raw[p] < kLossEpsilon;
    const bool above = raw[p] > 1.0 - kLossEpsilon;
    // Descent moves raw by -d: keep the gradient only if that heads inward.
    if ((below && d > 0.0) || (above && d < 0.0)) continue;
    g[p] = std::clamp(d, -clip, clip);
  }
  return g;
}

}  // namespace convrec::belief
