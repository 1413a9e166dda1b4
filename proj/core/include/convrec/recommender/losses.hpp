// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace convrec::rec {

inline constexpr double kDefaultMargin = 0.5;

/// s_pos^2 + max(margin - s_neg, 0)^2.
double rec_loss(double positive_score, double negative_score, double margin = kDefaultMargin);

struct RecLossGradient {
  double positive = 0.0;
  double negative = 0.0;
};

RecLossGradient rec_loss_gradient(double positive_score, double negative_score,
                                  double margin = kDefaultMargin);

}  // namespace convrec::rec
