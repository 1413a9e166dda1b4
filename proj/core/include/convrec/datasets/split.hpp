// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "convrec/datasets/interactions.hpp"

namespace convrec::data {

struct SplitConfig {
  double train = 0.7;
  double validation = 0.15;
  double test = 0.15;
  std::uint64_t seed = 123;

  void validate() const;  // ratios non-negative and summing to 1
};

struct Splits {
  InteractionLog train;
  InteractionLog validation;
  InteractionLog test;
};

/// Random per-record partition. Sizes are round(n*train), round(n*validation)
/// and the remainder; each part keeps the original record order.
/// Deterministic for a given seed. Throws ConfigError on an empty log.
Splits split_interactions(const InteractionLog& log, const SplitConfig& config);

}  // namespace convrec::data
