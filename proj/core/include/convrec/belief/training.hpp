// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "convrec/belief/belief_tracker.hpp"
#include "convrec/datasets/catalog.hpp"
#include "convrec/datasets/history.hpp"
#include "convrec/datasets/interactions.hpp"
#include "convrec/recommender/embedding_store.hpp"
#include "convrec/recommender/training.hpp"

namespace convrec::belief {

struct BtnTrainingConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  double min_learning_rate = 0.0;
  double mask_rate = 0.5;
  double gradient_clip = 100.0;
  std::uint64_t seed = 123;
};

struct BtnTrainingReport {
  double initial_validation_loss = 0.0;
  double final_validation_loss = 0.0;
  std::size_t steps = 0;
  std::vector<rec::EpochRecord> epochs;
};

/// The embedding store is read only: the tracker consumes user rows as inputs.
struct BtnTrainingData {
  const data::ItemCatalog& catalog;
  const std::vector<data::UserHistory>& histories;
  const rec::EmbeddingStore& store;
  std::span<const data::Interaction> train;
  std::span<const data::Interaction> validation;  // falls back to train when empty
};

/// Attribute loss of one pair given its history matrix and masked feedback,
/// with the gradient (times `scale`) added to `grads`. The forward pass runs in
/// train mode with dropout masks drawn from `rng`. Returns the loss.
double accumulate_btn_pair(const BeliefTracker& tracker, std::span<const double> user_embedding,
                           const nn::Tensor& history_attributes,
                           std::span<const double> masked_feedback,
                           std::span<const double> attributes, double gradient_clip,
                           double scale, Rng& rng, std::vector<nn::Tensor>& grads);

/// Mean attribute loss over `pairs` in eval mode, feedback masked from `seed`.
double btn_validation_loss(const BeliefTracker& tracker, const BtnTrainingData& data,
                           std::span<const data::Interaction> pairs, double mask_rate,
                           std::uint64_t seed);

/// For every training pair (u, v): a' = mask(b(v)), q = clamp(A(u, B_u) a'),
/// minimise attribute_loss(q, b(v)). Adam with a cosine schedule over all
/// steps. On divergence the parameters of the last finite epoch are restored
/// and TrainingError is thrown.
BtnTrainingReport train_btn(BeliefTracker& tracker, const BtnTrainingData& data,
                            const BtnTrainingConfig& config, const rec::ProgressFn& progress = {});

/// Relation matrix averaged over the given users (eval mode).
RelationMatrix mean_relation_matrix(const BeliefTracker& tracker, const BtnTrainingData& data,
                                    std::span<const UserId> users);

}  // namespace convrec::belief
