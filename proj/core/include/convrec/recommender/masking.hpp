// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "convrec/rng.hpp"

namespace convrec::rec {

/// Replaces each component of b(v) by 0.5 independently with probability
/// `rate`. One uniform draw per component, so the stream position after the
/// call depends only on b.size().
std::vector<double> mask_attributes(std::span<const double> attributes, double rate, Rng& rng);

}  // namespace convrec::rec
