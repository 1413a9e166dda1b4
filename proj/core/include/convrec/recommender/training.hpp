// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "convrec/datasets/catalog.hpp"
#include "convrec/datasets/history.hpp"
#include "convrec/datasets/interactions.hpp"
#include "convrec/nnkit/tensor.hpp"
#include "convrec/recommender/embedding_store.hpp"
#include "convrec/recommender/recommendation_net.hpp"

namespace convrec::rec {

struct RnTrainingConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  double min_learning_rate = 0.0;
  double margin = 0.5;
  double mask_rate = 0.5;
  std::size_t refresh_every = 500;  // optimizer iterations between E^attr refreshes
  std::uint64_t seed = 123;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double learning_rate = 0.0;
};

using ProgressFn = std::function<void(const EpochRecord&)>;

struct RnTrainingReport {
  double initial_validation_loss = 0.0;
  double final_validation_loss = 0.0;
  std::size_t steps = 0;
  std::vector<std::size_t> refresh_steps;  // optimizer steps after which E^attr was rebuilt
  std::vector<EpochRecord> epochs;
};

struct RnTrainingData {
  const data::ItemCatalog& catalog;
  const std::vector<data::UserHistory>& histories;
  std::span<const data::Interaction> train;
  std::span<const data::Interaction> validation;  // falls back to train when empty
};

/// [history_rows + 1, D] image: history item rows (zero padded, rows equal to
/// `exclude` zeroed) followed by the user row.
nn::Tensor history_image(const EmbeddingStore& store, std::span<const double> user_embedding,
                         const data::UserHistory& history, std::size_t history_rows,
                         const ItemId* exclude = nullptr);

/// Gradient buffers for one optimizer step.
struct RnGradients {
  std::vector<nn::Tensor> trunk;
  std::vector<nn::Tensor> head;
  nn::Tensor users;
  nn::Tensor items;

  static RnGradients zeros(const RecommendationNet& net, const EmbeddingStore& store);
  void clear();
};

/// Margin loss of one (u, v, v_neg) triple given the masked attribute vector,
/// with its gradient (times `scale`) added to `grads`. Returns the loss.
double accumulate_rn_pair(const RecommendationNet& net, const EmbeddingStore& store,
                          const RnTrainingData& data, const nn::Tensor& attribute_embeddings,
                          const data::Interaction& pair, ItemId negative,
                          std::span<const double> masked_attributes, double margin, double scale,
                          RnGradients& grads);

/// Mean margin loss over `pairs` in eval mode with negatives and masks drawn
/// from `seed`; E^attr is rebuilt from the current store.
double rn_validation_loss(const RecommendationNet& net, const EmbeddingStore& store,
                          const RnTrainingData& data, std::span<const data::Interaction> pairs,
                          const RnTrainingConfig& config, std::uint64_t seed);

/// Trains the network and the embedding store jointly with Adam under a
/// cosine schedule. Per pair: draw a negative uniformly from the other items,
/// mask b(v), form o' from the current (stale) E^attr and minimise the margin
/// loss. E^attr is rebuilt every `refresh_every` optimizer steps and never
/// receives gradients. Throws TrainingError on divergence after restoring the
/// parameters of the last finite epoch.
RnTrainingReport train_rn(RecommendationNet& net, EmbeddingStore& store,
                          const RnTrainingData& data, const RnTrainingConfig& config,
                          const ProgressFn& progress = {},
                          std::function<void(std::size_t, const nn::Tensor&)> on_refresh = {});

}  // namespace convrec::rec
