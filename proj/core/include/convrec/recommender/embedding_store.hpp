// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "convrec/ids.hpp"
#include "convrec/nnkit/checkpoint.hpp"
#include "convrec/nnkit/tensor.hpp"

namespace convrec::rec {

inline constexpr std::size_t kDefaultEmbeddingDim = 64;

/// Trainable user and item embedding tables shared by both networks.
struct EmbeddingStore {
  nn::Tensor users;  // [num_users, dim]
  nn::Tensor items;  // [num_items, dim]

  /// Rows drawn uniformly from [-1/sqrt(dim), 1/sqrt(dim)].
  static EmbeddingStore random(std::size_t num_users, std::size_t num_items, std::size_t dim,
                               std::uint64_t seed);

  std::size_t dim() const noexcept { return items.rank() == 2 ? items.dim(1) : 0; }
  std::size_t num_users() const noexcept { return users.rank() == 2 ? users.dim(0) : 0; }
  std::size_t num_items() const noexcept { return items.rank() == 2 ? items.dim(0) : 0; }

  /// Throws LookupError for ids outside the tables.
  std::span<const double> user(UserId id) const;
  std::span<const double> item(ItemId id) const;

  /// User row, or a zero row for a cold-start user.
  nn::Tensor user_or_zero(std::optional<UserId> id) const;

  void store(nn::Checkpoint& checkpoint) const;
  static EmbeddingStore restore(const nn::Checkpoint& checkpoint);
};

}  // namespace convrec::rec
