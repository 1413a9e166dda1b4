// SPDX-License-Identifier: Apache-2.0
#include "convrec/recommender/ranking.hpp"

#include <algorithm>
#include <numeric>

#include "convrec/errors.hpp"

namespace convrec::rec {

std::vector<ItemId> rank_by_score(std::span<const ItemId> candidates,
                                  std::span<const double> scores, std::size_t k) {
  if (candidates.size() != scores.size()) {
    throw UsageError("rank_by_score: " + std::to_string(candidates.size()) + " candidates but " +
                     std::to_string(scores.size()) + " scores");
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n = std::min(k, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return candidates[a] < candidates[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    better);
  std::vector<ItemId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(candidates[order[i]]);
  return out;
}

}  // namespace convrec::rec
