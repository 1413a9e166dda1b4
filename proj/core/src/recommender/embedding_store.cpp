// SPDX-License-Identifier: Apache-2.0
#include "convrec/recommender/embedding_store.hpp"

#include <cmath>
#include <string>

#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::rec {

EmbeddingStore EmbeddingStore::random(std::size_t num_users, std::size_t num_items,
                                      std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  EmbeddingStore store{nn::Tensor({num_users, dim}), nn::Tensor({num_items, dim})};
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  Rng users(derive_seed(seed, {0}));
  Rng items(derive_seed(seed, {1}));
  for (double& v : store.users.values()) v = (2.0 * uniform01(users) - 1.0) * bound;
  for (double& v : store.items.values()) v = (2.0 * uniform01(items) - 1.0) * bound;
  return store;
}

std::span<const double> EmbeddingStore::user(UserId id) const {
  if (id.index() >= num_users()) {
    throw LookupError("unknown user id " + std::to_string(id.value) + " (" +
                      std::to_string(num_users()) + " users)");
  }
  return users.row(id.index());
}

std::span<const double> EmbeddingStore::item(ItemId id) const {
  if (id.index() >= num_items()) {
    throw LookupError("unknown item id " + std::to_string(id.value) + " (" +
                      std::to_string(num_items()) + " items)");
  }
  return items.row(id.index());
}

nn::Tensor EmbeddingStore::user_or_zero(std::optional<UserId> id) const {
  nn::Tensor row({dim()});
  if (id) {
    const auto src = user(*id);
    std::copy(src.begin(), src.end(), row.data());
  }
  return row;
}

void EmbeddingStore::store(nn::Checkpoint& checkpoint) const {
  checkpoint.add("embeddings/users", users);
  checkpoint.add("embeddings/items", items);
}

EmbeddingStore EmbeddingStore::restore(const nn::Checkpoint& checkpoint) {
  EmbeddingStore store{checkpoint.get("embeddings/users"), checkpoint.get("embeddings/items")};
  if (store.users.rank() != 2 || store.items.rank() != 2 ||
      store.users.dim(1) != store.items.dim(1)) {
    throw ConfigError("checkpoint embedding tables have inconsistent shapes " +
                      nn::shape_string(store.users.shape()) + " and " +
                      nn::shape_string(store.items.shape()));
  }
  return store;
}

}  // namespace convrec::rec
