// SPDX-License-Identifier: Apache-2.0
#include "convrec/config/pipeline.hpp"

#include "convrec/errors.hpp"
#include "convrec/nnkit/checkpoint.hpp"
#include "convrec/recommender/attributes.hpp"
#include "convrec/rng.hpp"
#include "convrec/simulation/strategies.hpp"

namespace convrec::config {

namespace {

// Distinct streams for parameter initialisation; the trainers derive their own
// shuffling and masking streams from the same base seed.
constexpr std::uint64_t kStoreStream = 0x5701;
constexpr std::uint64_t kRnStream = 0x5702;
constexpr std::uint64_t kBtnStream = 0x5703;

}  // namespace

data::Dataset load_run_dataset(const RunConfig& config) {
  if (config.dataset.empty()) throw ConfigError("dataset: no manifest path given");
  auto manifest = data::DatasetManifest::load(config.dataset);
  if (config.history_policy) manifest.history_policy = *config.history_policy;
  if (config.history_length) manifest.history_length = *config.history_length;
  return data::load_dataset(manifest, config.split);
}

TrainedRecommender train_recommender(const data::Dataset& ds, const RunConfig& config,
                                     const rec::ProgressFn& progress) {
  TrainedRecommender out{
      rec::RecommendationNet(ds.history_length, config.embedding_dim, config.rn,
                             derive_seed(config.seed, {kRnStream})),
      rec::EmbeddingStore::random(ds.log.num_users(), ds.catalog.num_items(),
                                  config.embedding_dim, derive_seed(config.seed, {kStoreStream})),
      {}};
  const rec::RnTrainingData data{ds.catalog, ds.histories, ds.splits.train.records,
                                 ds.splits.validation.records};
  out.report = rec::train_rn(out.rn, out.store, data, config.train_rn, progress);
  return out;
}

TrainedBeliefTracker train_belief_tracker(const data::Dataset& ds,
                                          const rec::EmbeddingStore& store,
                                          const RunConfig& config,
                                          const rec::ProgressFn& progress) {
  if (store.num_users() != ds.log.num_users() || store.num_items() != ds.catalog.num_items()) {
    throw ConfigError("embedding tables do not match the dataset (train the recommender first)");
  }
  TrainedBeliefTracker out{
      belief::BeliefTracker(ds.catalog.num_attributes(), ds.history_length, store.dim(),
                            config.btn, derive_seed(config.seed, {kBtnStream})),
      {}};
  const belief::BtnTrainingData data{ds.catalog, ds.histories, store, ds.splits.train.records,
                                     ds.splits.validation.records};
  out.report = belief::train_btn(out.btn, data, config.train_btn, progress);
  return out;
}

std::shared_ptr<const dialogue::ModelBundle> assemble_models(const data::Dataset& ds,
                                                             rec::RecommendationNet rn,
                                                             rec::EmbeddingStore store,
                                                             belief::BeliefTracker btn) {
  auto attr = rec::refresh_attribute_embeddings(store, ds.catalog);
  auto models = std::make_shared<dialogue::ModelBundle>(dialogue::ModelBundle{
      ds.catalog, ds.histories, std::move(store), std::move(attr), std::move(rn), std::move(btn),
      data::item_popularity(ds.splits.train, ds.catalog.num_items())});
  models->validate();
  return models;
}

std::shared_ptr<const dialogue::ModelBundle> load_trained_models(
    const data::Dataset& ds, const std::filesystem::path& recommender_checkpoint,
    const std::filesystem::path& belief_checkpoint) {
  return std::make_shared<dialogue::ModelBundle>(dialogue::load_models(
      ds.catalog, ds.histories, data::item_popularity(ds.splits.train, ds.catalog.num_items()),
      recommender_checkpoint, belief_checkpoint));
}

rec::EmbeddingStore load_embedding_store(const std::filesystem::path& recommender_checkpoint) {
  return rec::EmbeddingStore::restore(nn::load_checkpoint(recommender_checkpoint));
}

belief::RelationMatrix export_relation(const dialogue::ModelBundle& models,
                                       std::optional<UserId> user) {
  auto relation_for = [&](std::optional<UserId> u) {
    const auto ctx = dialogue::make_user_context(models, u);
    return models.btn.relation_matrix(ctx.embedding, ctx.history_attributes, nn::Mode::kEval);
  };
  if (user) return relation_for(user);
  std::vector<belief::RelationMatrix> all;
  for (std::size_t u = 0; u < models.num_users(); ++u) all.push_back(relation_for(UserId(u)));
  if (all.empty()) return relation_for(std::nullopt);
  return belief::RelationMatrix::average(all);
}

dialogue::ConversationEngine make_engine(std::shared_ptr<const dialogue::ModelBundle> models,
                                         const RunConfig& config, std::string_view strategy) {
  return {std::move(models), config.policy, sim::make_selector(strategy),
          sim::make_ranker(config.simulation.ranker)};
}

}  // namespace convrec::config
