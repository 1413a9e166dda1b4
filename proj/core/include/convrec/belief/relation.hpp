// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace convrec::belief {

/// Symmetric P x P attribute relation matrix with a unit diagonal.
class RelationMatrix {
 public:
  RelationMatrix() = default;

  /// A = (R + R^T) / 2 with the diagonal then set to 1, where R is the raw
  /// row-major network output of P*P values.
  static RelationMatrix from_raw(std::span<const double> raw, std::size_t num_attributes);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * n_ + col]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Mean of several matrices of the same size (still symmetric, unit diagonal).
  static RelationMatrix average(std::span<const RelationMatrix> matrices);

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// q = clamp(A a, 0, 1).
std::vector<double> predict_beliefs(const RelationMatrix& relation, std::span<const double> feedback);

/// A a without clamping.
std::vector<double> raw_beliefs(const RelationMatrix& relation, std::span<const double> feedback);

/// Maps dL/dA (P*P, row-major) to dL/dR for R the raw network output.
std::vector<double> relation_gradient_to_raw(std::span<const double> grad_relation,
                                             std::size_t num_attributes);

inline constexpr double kLossEpsilon = 1e-6;

/// -sum_p [b_p ln q_p + (1 - b_p) ln(1 - q_p)] with q clamped to [eps, 1-eps].
double attribute_loss(std::span<const double> beliefs, std::span<const double> attributes);

/// Batch mean of attribute_loss over equally sized rows.
double attribute_loss(std::span<const std::vector<double>> beliefs,
                      std::span<const std::vector<double>> attributes);

/// Gradient of attribute_loss(clamp(raw, 0, 1), b) with respect to the
/// unclamped beliefs `raw`. Inside [eps, 1-eps] this is the exact derivative.
/// Outside, the clamp passes the gradient straight through only when a
/// descent step moves the value back toward the range. Each component is
/// clipped to [-clip, clip].
std::vector<double> attribute_loss_gradient(std::span<const double> raw,
                                            std::span<const double> attributes,
                                            double clip = 100.0);

}  // namespace convrec::belief
