// SPDX-License-Identifier: Apache-2.0
#include "convrec/recommender/losses.hpp"

#include <algorithm>

namespace convrec::rec {

double rec_loss(double positive_score, double negative_score, double margin) {
  const double hinge = std::max(margin - negative_score, 0.0);
  return positive_score * positive_score + hinge * hinge;
}

RecLossGradient rec_loss_gradient(double positive_score, double negative_score, double margin) {
  const double hinge = std::max(margin - negative_score, 0.0);
  return {2.0 * positive_score, -2.0 * hinge};
}

}  // namespace convrec::rec
