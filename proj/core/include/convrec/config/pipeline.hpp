// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "convrec/belief/belief_tracker.hpp"
#include "convrec/belief/training.hpp"
#include "convrec/config/run_config.hpp"
#include "convrec/datasets/dataset.hpp"
#include "convrec/dialogue/engine.hpp"
#include "convrec/dialogue/models.hpp"
#include "convrec/recommender/embedding_store.hpp"
#include "convrec/recommender/recommendation_net.hpp"
#include "convrec/recommender/training.hpp"

namespace convrec::config {

/// Loads the manifest named by the config and applies its history overrides.
data::Dataset load_run_dataset(const RunConfig& config);

struct TrainedRecommender {
  rec::RecommendationNet rn;
  rec::EmbeddingStore store;
  rec::RnTrainingReport report;
};

/// Fresh RN and embedding tables trained on the training split.
TrainedRecommender train_recommender(const data::Dataset& dataset, const RunConfig& config,
                                     const rec::ProgressFn& progress = {});

struct TrainedBeliefTracker {
  belief::BeliefTracker btn;
  belief::BtnTrainingReport report;
};

/// Fresh BTN trained on the training split against frozen user embeddings.
TrainedBeliefTracker train_belief_tracker(const data::Dataset& dataset,
                                          const rec::EmbeddingStore& store,
                                          const RunConfig& config,
                                          const rec::ProgressFn& progress = {});

/// Bundles trained parts with the dataset's catalog, histories and training
/// popularity; E^attr is rebuilt from the final item embeddings.
std::shared_ptr<const dialogue::ModelBundle> assemble_models(const data::Dataset& dataset,
                                                             rec::RecommendationNet rn,
                                                             rec::EmbeddingStore store,
                                                             belief::BeliefTracker btn);

/// Bundle from a recommender and a belief checkpoint, with the dataset's
/// catalog, histories and training popularity.
std::shared_ptr<const dialogue::ModelBundle> load_trained_models(
    const data::Dataset& dataset, const std::filesystem::path& recommender_checkpoint,
    const std::filesystem::path& belief_checkpoint);

/// Embedding tables stored in a recommender checkpoint.
rec::EmbeddingStore load_embedding_store(const std::filesystem::path& recommender_checkpoint);

/// A for one user (eval mode), or the mean over all users when none is given.
belief::RelationMatrix export_relation(const dialogue::ModelBundle& models,
                                       std::optional<UserId> user = std::nullopt);

/// Engine for a named strategy with the configured policy and ranker.
dialogue::ConversationEngine make_engine(std::shared_ptr<const dialogue::ModelBundle> models,
                                         const RunConfig& config, std::string_view strategy);

}  // namespace convrec::config
