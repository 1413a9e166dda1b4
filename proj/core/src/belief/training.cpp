// SPDX-License-Identifier: Apache-2.0
#include "convrec/belief/training.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "convrec/errors.hpp"
#include "convrec/nnkit/optimizer.hpp"
#include "convrec/recommender/masking.hpp"
#include "convrec/rng.hpp"

namespace convrec::belief {
namespace {

const data::UserHistory& history_of(const BtnTrainingData& data, UserId user) {
  if (user.index() >= data.histories.size() || data.histories[user.index()].user != user) {
    throw InvariantError("no history entry for user " + std::to_string(user.value));
  }
  return data.histories[user.index()];
}

void validate(const BtnTrainingConfig& c, const BtnTrainingData& data,
              const BeliefTracker& tracker) {
  if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (c.min_learning_rate < 0.0 || c.min_learning_rate > c.learning_rate) {
    throw ConfigError("min_learning_rate must lie in [0, learning_rate]");
  }
  if (!(c.mask_rate >= 0.0 && c.mask_rate <= 1.0)) throw ConfigError("mask_rate must lie in [0, 1]");
  if (!(c.gradient_clip > 0.0)) throw ConfigError("gradient_clip must be positive");
  if (tracker.num_attributes() != data.catalog.num_attributes()) {
    throw ConfigError("belief tracker and catalog disagree on the number of attributes");
  }
  if (tracker.embedding_dim() != data.store.dim()) {
    throw ConfigError("belief tracker and embedding store disagree on the dimension");
  }
}

void copy_parameters(const nn::Network& from, nn::Network& to) {
  const auto src = from.parameters();
  auto dst = to.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = *src[i];
}

}  // namespace

double accumulate_btn_pair(const BeliefTracker& tracker, std::span<const double> user_embedding,
                           const nn::Tensor& history_attributes,
                           std::span<const double> masked, std::span<const double> attributes,
                           double gradient_clip, double scale, Rng& rng,
                           std::vector<nn::Tensor>& grads) {
  const std::size_t p = tracker.num_attributes();
  nn::ForwardCache cache;
  const RelationMatrix a = tracker.relation_matrix(user_embedding, history_attributes,
                                                   nn::Mode::kTrain, &rng, &cache);
  const auto raw = raw_beliefs(a, masked);
  const auto g = attribute_loss_gradient(raw, attributes, gradient_clip);
  // q_r = sum_c A_rc a_c, so dL/dA_rc = g_r a_c.
  std::vector<double> grad_a(p * p);
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c) grad_a[r * p + c] = g[r] * masked[c] * scale;
  }
  tracker.network().backward(cache, nn::Tensor({p * p}, relation_gradient_to_raw(grad_a, p)),
                             grads);
  return attribute_loss(raw, attributes);
}

double btn_validation_loss(const BeliefTracker& tracker, const BtnTrainingData& data,
                           std::span<const data::Interaction> pairs, double mask_rate,
                           std::uint64_t seed) {
  if (pairs.empty()) return 0.0;
  Rng rng(seed);
  double total = 0.0;
  for (const auto& pair : pairs) {
    const auto b = data.catalog.attribute_vector(pair.item);
    const auto masked = rec::mask_attributes(b, mask_rate, rng);
    const auto hist = data::history_attribute_matrix(data.catalog, history_of(data, pair.user),
                                                     tracker.history_rows(), &pair.item);
    total += attribute_loss(
        tracker.beliefs(data.store.user(pair.user), hist, masked, nn::Mode::kEval), b);
  }
  return total / static_cast<double>(pairs.size());
}

BtnTrainingReport train_btn(BeliefTracker& tracker, const BtnTrainingData& data,
                            const BtnTrainingConfig& config, const rec::ProgressFn& progress) {
  validate(config, data, tracker);
  if (data.train.empty()) throw ConfigError("no training interactions");
  const auto validation = data.validation.empty() ? data.train : data.validation;
  const std::uint64_t validation_seed = derive_seed(config.seed, {0xB11});

  BtnTrainingReport report;
  report.initial_validation_loss =
      btn_validation_loss(tracker, data, validation, config.mask_rate, validation_seed);

  nn::Network& net = tracker.network();
  nn::Adam opt(net.parameters());
  auto grads = net.make_gradients();
  nn::Network last_good = net.clone();

  const std::size_t n = data.train.size();
  const std::size_t batches = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches * config.epochs;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, {0xB7A}));
  double lr = config.learning_rate;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    try {
      for (std::size_t batch = 0; batch < batches; ++batch) {
        const std::size_t begin = batch * config.batch_size;
        const std::size_t end = std::min(n, begin + config.batch_size);
        const double scale = 1.0 / static_cast<double>(end - begin);
        for (auto& g : grads) g.fill(0.0);
        double batch_loss = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          const auto& pair = data.train[order[i]];
          const auto b = data.catalog.attribute_vector(pair.item);
          const auto masked = rec::mask_attributes(b, config.mask_rate, rng);
          const auto hist = data::history_attribute_matrix(
              data.catalog, history_of(data, pair.user), tracker.history_rows(), &pair.item);
          batch_loss += accumulate_btn_pair(tracker, data.store.user(pair.user), hist, masked, b,
                                            config.gradient_clip, scale, rng, grads);
        }
        if (!std::isfinite(batch_loss)) {
          throw TrainingError("non-finite attribute loss at step " + std::to_string(report.steps));
        }
        epoch_loss += batch_loss;
        lr = nn::cosine_lr(report.steps, total_steps, config.learning_rate,
                           config.min_learning_rate);
        opt.step(grads, lr);
        ++report.steps;
      }
    } catch (const TrainingError& e) {
      copy_parameters(last_good, net);
      throw TrainingError(std::string("belief training diverged in epoch ") +
                          std::to_string(epoch) + ": " + e.what() +
                          "; parameters restored to the last finite epoch");
    }
    rec::EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(n);
    record.validation_loss =
        btn_validation_loss(tracker, data, validation, config.mask_rate, validation_seed);
    record.learning_rate = lr;
    if (!std::isfinite(record.validation_loss)) {
      copy_parameters(last_good, net);
      throw TrainingError("belief validation loss became non-finite in epoch " +
                          std::to_string(epoch) + "; parameters restored");
    }
    last_good = net.clone();
    report.epochs.push_back(record);
    if (progress) progress(record);
  }
  report.final_validation_loss =
      report.epochs.empty() ? report.initial_validation_loss : report.epochs.back().validation_loss;
  return report;
}

RelationMatrix mean_relation_matrix(const BeliefTracker& tracker, const BtnTrainingData& data,
                                    std::span<const UserId> users) {
  std::vector<RelationMatrix> mats;
  mats.reserve(users.size());
  for (UserId u : users) {
    const auto hist = data::history_attribute_matrix(data.catalog, history_of(data, u),
                                                     tracker.history_rows());
    mats.push_back(tracker.relation_matrix(data.store.user(u), hist, nn::Mode::kEval));
  }
  return RelationMatrix::average(mats);
}

}  // namespace convrec::belief
