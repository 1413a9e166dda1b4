// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "convrec/ids.hpp"

namespace convrec::rec {

/// The min(k, |candidates|) candidates with the lowest scores, ascending;
/// equal scores are ordered by ascending item id. `scores[i]` belongs to
/// `candidates[i]`.
std::vector<ItemId> rank_by_score(std::span<const ItemId> candidates,
                                  std::span<const double> scores, std::size_t k);

}  // namespace convrec::rec
