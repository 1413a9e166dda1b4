// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convrec/belief/belief_tracker.hpp"
#include "convrec/datasets/catalog.hpp"
#include "convrec/datasets/history.hpp"
#include "convrec/ids.hpp"
#include "convrec/nnkit/tensor.hpp"
#include "convrec/recommender/embedding_store.hpp"
#include "convrec/recommender/recommendation_net.hpp"

namespace convrec::dialogue {

/// Everything a conversation needs, frozen after construction. Shared
/// read-only between sessions.
struct ModelBundle {
  data::ItemCatalog catalog;
  std::vector<data::UserHistory> histories;  // indexed by user id
  rec::EmbeddingStore store;
  nn::Tensor attribute_embeddings;  // E^attr [P, D]
  rec::RecommendationNet rn;
  belief::BeliefTracker btn;
  std::vector<std::size_t> popularity;  // interaction count per item

  /// Throws ConfigError when the parts disagree on P, D or the universes.
  void validate() const;
  std::size_t num_users() const noexcept { return store.num_users(); }
};

/// Per-user inputs, computed once per session.
struct UserContext {
  std::optional<UserId> user;
  std::vector<double> embedding;  // zero row for a cold-start user
  nn::Tensor history_attributes;  // B_u [btn rows, P]
  nn::Tensor history_image;       // [rn rows + 1, D]
};

/// Throws LookupError for an unknown user id.
UserContext make_user_context(const ModelBundle& models, std::optional<UserId> user);

/// q = clamp(A a, 0, 1) with the tracker in eval mode.
std::vector<double> current_beliefs(const ModelBundle& models, const UserContext& user,
                                    std::span<const double> feedback);

/// RN scores (lower is better) for `items` given beliefs q: o = q^T E^attr.
std::vector<double> score_items(const ModelBundle& models, const UserContext& user,
                                std::span<const double> beliefs, std::span<const ItemId> items);

/// Recommender checkpoint: RN, embedding tables and the E^attr table
/// recomputed from the stored item embeddings.
void save_recommender(const std::filesystem::path& path, const rec::RecommendationNet& rn,
                      const rec::EmbeddingStore& store, const data::ItemCatalog& catalog);
void save_belief_tracker(const std::filesystem::path& path, const belief::BeliefTracker& btn);

ModelBundle load_models(data::ItemCatalog catalog, std::vector<data::UserHistory> histories,
                        std::vector<std::size_t> popularity,
                        const std::filesystem::path& recommender_checkpoint,
                        const std::filesystem::path& belief_checkpoint);

}  // namespace convrec::dialogue
