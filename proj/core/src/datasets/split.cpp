// SPDX-License-Identifier: Apache-2.0
#include "convrec/datasets/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::data {

void SplitConfig::validate() const {
  if (train < 0 || validation < 0 || test < 0) {
    throw ConfigError("split ratios must be non-negative");
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

Splits split_interactions(const InteractionLog& log, const SplitConfig& config) {
  config.validate();
  if (log.empty()) throw ConfigError("cannot split an empty interaction log");
  const std::size_t n = log.records.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  shuffle(order, rng);

  const auto n_train = std::min(n, static_cast<std::size_t>(std::llround(n * config.train)));
  const auto n_val =
      std::min(n - n_train, static_cast<std::size_t>(std::llround(n * config.validation)));

  auto take = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> idx(order.begin() + begin, order.begin() + end);
    std::sort(idx.begin(), idx.end());
    std::vector<Interaction> part;
    part.reserve(idx.size());
    for (std::size_t i : idx) part.push_back(log.records[i]);
    return log.with_records(std::move(part));
  };
  return {take(0, n_train), take(n_train, n_train + n_val), take(n_train + n_val, n)};
}

}  // namespace convrec::data
