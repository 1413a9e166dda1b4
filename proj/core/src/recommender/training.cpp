// SPDX-License-Identifier: Apache-2.0
#include "convrec/recommender/training.hpp"

#include <cmath>
#include <numeric>

#include "convrec/errors.hpp"
#include "convrec/nnkit/optimizer.hpp"
#include "convrec/recommender/attributes.hpp"
#include "convrec/recommender/losses.hpp"
#include "convrec/recommender/masking.hpp"
#include "convrec/rng.hpp"

namespace convrec::rec {
namespace {

const data::UserHistory& history_of(const RnTrainingData& data, UserId user) {
  if (user.index() >= data.histories.size() || data.histories[user.index()].user != user) {
    throw InvariantError("no history entry for user " + std::to_string(user.value));
  }
  return data.histories[user.index()];
}

ItemId sample_negative(ItemId positive, std::size_t num_items, Rng& rng) {
  auto idx = static_cast<std::size_t>(uniform_index(rng, num_items - 1));
  if (idx >= positive.index()) ++idx;
  return ItemId(idx);
}

void validate(const RnTrainingConfig& c, const RnTrainingData& data, const EmbeddingStore& store,
              const RecommendationNet& net) {
  if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (c.min_learning_rate < 0.0 || c.min_learning_rate > c.learning_rate) {
    throw ConfigError("min_learning_rate must lie in [0, learning_rate]");
  }
  if (c.refresh_every == 0) throw ConfigError("refresh_every must be positive");
  if (data.catalog.num_items() < 2) throw ConfigError("negative sampling needs at least two items");
  if (store.num_items() != data.catalog.num_items()) {
    throw ConfigError("embedding store and catalog disagree on the number of items");
  }
  if (store.dim() != net.embedding_dim()) {
    throw ConfigError("embedding store and recommendation net disagree on the dimension");
  }
}

double pair_loss(const RecommendationNet& net, const EmbeddingStore& store,
                 const RnTrainingData& data, const nn::Tensor& attr_emb,
                 const data::Interaction& pair, ItemId negative,
                 std::span<const double> masked, double margin) {
  const auto& hist = history_of(data, pair.user);
  const nn::Tensor image =
      history_image(store, store.user(pair.user), hist, net.history_rows(), &pair.item);
  const nn::Tensor s = net.preference(image, belief_embedding(masked, attr_emb));
  return rec_loss(net.score_item(s, store.item(pair.item)), net.score_item(s, store.item(negative)),
                  margin);
}

struct Snapshot {
  nn::Network trunk;
  nn::Network head;
  EmbeddingStore store;
};

Snapshot take_snapshot(const RecommendationNet& net, const EmbeddingStore& store) {
  return {net.trunk().clone(), net.head().clone(), store};
}

void restore_snapshot(const Snapshot& snap, RecommendationNet& net, EmbeddingStore& store) {
  auto copy = [](const nn::Network& from, nn::Network& to) {
    const auto src = from.parameters();
    auto dst = to.parameters();
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = *src[i];
  };
  copy(snap.trunk, net.trunk());
  copy(snap.head, net.head());
  store = snap.store;
}


}  // namespace

RnGradients RnGradients::zeros(const RecommendationNet& net, const EmbeddingStore& store) {
  return {net.trunk().make_gradients(), net.head().make_gradients(), nn::zeros_like(store.users),
          nn::zeros_like(store.items)};
}

void RnGradients::clear() {
  for (auto& g : trunk) g.fill(0.0);
  for (auto& g : head) g.fill(0.0);
  users.fill(0.0);
  items.fill(0.0);
}

double accumulate_rn_pair(const RecommendationNet& net, const EmbeddingStore& store,
                          const RnTrainingData& data, const nn::Tensor& attr_emb,
                          const data::Interaction& pair, ItemId negative,
                          std::span<const double> masked, double margin, double scale,
                          RnGradients& grads) {
  const std::size_t d = store.dim();
  const std::size_t rows = net.history_rows();
  const auto& hist = history_of(data, pair.user);
  const nn::Tensor image = history_image(store, store.user(pair.user), hist, rows, &pair.item);
  const auto o = belief_embedding(masked, attr_emb);
  nn::ForwardCache trunk_cache, pos_cache, neg_cache;
  const nn::Tensor s = net.preference(image, o, &trunk_cache);
  const double pos = net.score_item(s, store.item(pair.item), &pos_cache);
  const double neg = net.score_item(s, store.item(negative), &neg_cache);
  const RecLossGradient g = rec_loss_gradient(pos, neg, margin);

  nn::Tensor ds({d});
  auto head_back = [&](const nn::ForwardCache& cache, double dscore, ItemId item) {
    if (dscore == 0.0) return;
    const auto r = net.head().backward(cache, nn::Tensor({1}, {dscore * scale}), grads.head);
    for (std::size_t j = 0; j < d; ++j) ds[j] += r.input_grad[j];
    auto dst = grads.items.row(item.index());
    for (std::size_t j = 0; j < d; ++j) dst[j] += r.side_grads[0][j];
  };
  head_back(pos_cache, g.positive, pair.item);
  head_back(neg_cache, g.negative, negative);

  // o is built from the stale E^attr and receives no gradient.
  const auto tr = net.trunk().backward(trunk_cache, ds, grads.trunk);
  const std::size_t used = std::min(rows, hist.items.size());
  for (std::size_t r = 0; r < used; ++r) {
    const ItemId item = hist.items[r];
    if (item == pair.item) continue;
    auto dst = grads.items.row(item.index());
    for (std::size_t j = 0; j < d; ++j) dst[j] += tr.input_grad[r * d + j];
  }
  auto du = grads.users.row(pair.user.index());
  for (std::size_t j = 0; j < d; ++j) du[j] += tr.input_grad[rows * d + j];
  return rec_loss(pos, neg, margin);
}

nn::Tensor history_image(const EmbeddingStore& store, std::span<const double> user_embedding,
                         const data::UserHistory& history, std::size_t history_rows,
                         const ItemId* exclude) {
  const std::size_t d = store.dim();
  if (user_embedding.size() != d) {
    throw ConfigError("user embedding has " + std::to_string(user_embedding.size()) +
                      " values, expected " + std::to_string(d));
  }
  nn::Tensor image({history_rows + 1, d});
  const std::size_t n = std::min(history_rows, history.items.size());
  for (std::size_t r = 0; r < n; ++r) {
    const ItemId item = history.items[r];
    if (exclude && item == *exclude) continue;
    const auto e = store.item(item);
    std::copy(e.begin(), e.end(), image.row(r).begin());
  }
  std::copy(user_embedding.begin(), user_embedding.end(), image.row(history_rows).begin());
  return image;
}

double rn_validation_loss(const RecommendationNet& net, const EmbeddingStore& store,
                          const RnTrainingData& data, std::span<const data::Interaction> pairs,
                          const RnTrainingConfig& config, std::uint64_t seed) {
  if (pairs.empty()) return 0.0;
  const nn::Tensor attr_emb = refresh_attribute_embeddings(store, data.catalog);
  Rng rng(seed);
  double total = 0.0;
  for (const auto& pair : pairs) {
    const ItemId negative = sample_negative(pair.item, data.catalog.num_items(), rng);
    const auto masked =
        mask_attributes(data.catalog.attribute_vector(pair.item), config.mask_rate, rng);
    total += pair_loss(net, store, data, attr_emb, pair, negative, masked, config.margin);
  }
  return total / static_cast<double>(pairs.size());
}

RnTrainingReport train_rn(RecommendationNet& net, EmbeddingStore& store,
                          const RnTrainingData& data, const RnTrainingConfig& config,
                          const ProgressFn& progress,
                          std::function<void(std::size_t, const nn::Tensor&)> on_refresh) {
  validate(config, data, store, net);
  if (data.train.empty()) throw ConfigError("no training interactions");
  const auto validation = data.validation.empty() ? data.train : data.validation;
  const std::uint64_t validation_seed = derive_seed(config.seed, {0xA11});

  RnTrainingReport report;
  report.initial_validation_loss =
      rn_validation_loss(net, store, data, validation, config, validation_seed);

  nn::Adam trunk_opt(net.trunk().parameters());
  nn::Adam head_opt(net.head().parameters());
  nn::Adam store_opt({&store.users, &store.items});
  RnGradients grads = RnGradients::zeros(net, store);

  const std::size_t n = data.train.size();
  const std::size_t batches = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches * config.epochs;

  nn::Tensor attr_emb = refresh_attribute_embeddings(store, data.catalog);
  if (on_refresh) on_refresh(0, attr_emb);

  Snapshot last_good = take_snapshot(net, store);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, {0x7A1}));
  double lr = config.learning_rate;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    try {
      for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t begin = b * config.batch_size;
        const std::size_t end = std::min(n, begin + config.batch_size);
        const double scale = 1.0 / static_cast<double>(end - begin);
        grads.clear();
        double batch_loss = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          const auto& pair = data.train[order[i]];
          const ItemId negative = sample_negative(pair.item, data.catalog.num_items(), rng);
          const auto masked =
              mask_attributes(data.catalog.attribute_vector(pair.item), config.mask_rate, rng);
          batch_loss += accumulate_rn_pair(net, store, data, attr_emb, pair, negative, masked,
                                           config.margin, scale, grads);
        }
        if (!std::isfinite(batch_loss)) {
          throw TrainingError("non-finite recommendation loss at step " +
                              std::to_string(report.steps));
        }
        epoch_loss += batch_loss;
        lr = nn::cosine_lr(report.steps, total_steps, config.learning_rate,
                           config.min_learning_rate);
        trunk_opt.step(grads.trunk, lr);
        head_opt.step(grads.head, lr);
        store_opt.step(std::vector<nn::Tensor>{grads.users, grads.items}, lr);
        ++report.steps;
        if (report.steps % config.refresh_every == 0) {
          attr_emb = refresh_attribute_embeddings(store, data.catalog);
          report.refresh_steps.push_back(report.steps);
          if (on_refresh) on_refresh(report.steps, attr_emb);
        }
      }
    } catch (const TrainingError& e) {
      restore_snapshot(last_good, net, store);
      throw TrainingError(std::string("recommendation training diverged in epoch ") +
                          std::to_string(epoch) + ": " + e.what() +
                          "; parameters restored to the last finite epoch");
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(n);
    record.validation_loss =
        rn_validation_loss(net, store, data, validation, config, validation_seed);
    record.learning_rate = lr;
    if (!std::isfinite(record.validation_loss)) {
      restore_snapshot(last_good, net, store);
      throw TrainingError("recommendation validation loss became non-finite in epoch " +
                          std::to_string(epoch) + "; parameters restored");
    }
    last_good = take_snapshot(net, store);
    report.epochs.push_back(record);
    if (progress) progress(record);
  }
  report.final_validation_loss =
      report.epochs.empty() ? report.initial_validation_loss : report.epochs.back().validation_loss;
  return report;
}

}  // namespace convrec::rec
