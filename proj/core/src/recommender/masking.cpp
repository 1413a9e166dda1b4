// SPDX-License-Identifier: Apache-2.0
#include "convrec/recommender/masking.hpp"

#include "convrec/errors.hpp"

namespace convrec::rec {

std::vector<double> mask_attributes(std::span<const double> attributes, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("mask rate must lie in [0, 1]");
  std::vector<double> out(attributes.begin(), attributes.end());
  for (double& v : out) {
    if (uniform01(rng) < rate) v = 0.5;
  }
  return out;
}

}  // namespace convrec::rec
