// SPDX-License-Identifier: Apache-2.0
#include "convrec/dialogue/models.hpp"

#include <string>

#include "convrec/errors.hpp"
#include "convrec/nnkit/checkpoint.hpp"
#include "convrec/recommender/attributes.hpp"
#include "convrec/recommender/training.hpp"

namespace convrec::dialogue {

namespace {

constexpr const char* kAttributeTable = "attributes/embeddings";

std::string mismatch(const char* what, std::size_t a, std::size_t b) {
  return std::string("model bundle: ") + what + " mismatch (" + std::to_string(a) + " vs " +
         std::to_string(b) + ")";
}

}  // namespace

void ModelBundle::validate() const {
  const std::size_t p = catalog.num_attributes();
  const std::size_t d = store.dim();
  if (store.num_items() != catalog.num_items()) {
    throw ConfigError(mismatch("item count", store.num_items(), catalog.num_items()));
  }
  if (btn.num_attributes() != p) {
    throw ConfigError(mismatch("belief tracker attribute count", btn.num_attributes(), p));
  }
  if (btn.embedding_dim() != d) {
    throw ConfigError(mismatch("belief tracker embedding dim", btn.embedding_dim(), d));
  }
  if (rn.embedding_dim() != d) {
    throw ConfigError(mismatch("recommendation net embedding dim", rn.embedding_dim(), d));
  }
  if (attribute_embeddings.rank() != 2 || attribute_embeddings.dim(0) != p ||
      attribute_embeddings.dim(1) != d) {
    throw ConfigError("model bundle: attribute embedding table must be [P, D]");
  }
  if (histories.size() != store.num_users()) {
    throw ConfigError(mismatch("history count", histories.size(), store.num_users()));
  }
  if (!popularity.empty() && popularity.size() != catalog.num_items()) {
    throw ConfigError(mismatch("popularity length", popularity.size(), catalog.num_items()));
  }
}

UserContext make_user_context(const ModelBundle& models, std::optional<UserId> user) {
  UserContext ctx;
  ctx.user = user;
  data::UserHistory history;
  if (user) {
    if (user->index() >= models.num_users()) {
      throw LookupError("unknown user id " + std::to_string(user->value));
    }
    history = models.histories[user->index()];
  }
  const nn::Tensor emb = models.store.user_or_zero(user);
  ctx.embedding.assign(emb.values().begin(), emb.values().end());
  ctx.history_attributes =
      data::history_attribute_matrix(models.catalog, history, models.btn.history_rows());
  ctx.history_image =
      rec::history_image(models.store, ctx.embedding, history, models.rn.history_rows());
  return ctx;
}

std::vector<double> current_beliefs(const ModelBundle& models, const UserContext& user,
                                    std::span<const double> feedback) {
  return models.btn.beliefs(user.embedding, user.history_attributes, feedback, nn::Mode::kEval);
}

std::vector<double> score_items(const ModelBundle& models, const UserContext& user,
                                std::span<const double> beliefs, std::span<const ItemId> items) {
  const auto o = rec::belief_embedding(beliefs, models.attribute_embeddings);
  const nn::Tensor s = models.rn.preference(user.history_image, o);
  std::vector<double> scores;
  scores.reserve(items.size());
  for (ItemId v : items) scores.push_back(models.rn.score_item(s, models.store.item(v)));
  return scores;
}

void save_recommender(const std::filesystem::path& path, const rec::RecommendationNet& rn,
                      const rec::EmbeddingStore& store, const data::ItemCatalog& catalog) {
  nn::Checkpoint ckpt;
  rn.store(ckpt);
  store.store(ckpt);
  ckpt.add(kAttributeTable, rec::refresh_attribute_embeddings(store, catalog));
  save_checkpoint(ckpt, path);
}

void save_belief_tracker(const std::filesystem::path& path, const belief::BeliefTracker& btn) {
  nn::Checkpoint ckpt;
  btn.store(ckpt);
  save_checkpoint(ckpt, path);
}

ModelBundle load_models(data::ItemCatalog catalog, std::vector<data::UserHistory> histories,
                        std::vector<std::size_t> popularity,
                        const std::filesystem::path& recommender_checkpoint,
                        const std::filesystem::path& belief_checkpoint) {
  const nn::Checkpoint rec_ckpt = nn::load_checkpoint(recommender_checkpoint);
  const nn::Checkpoint btn_ckpt = nn::load_checkpoint(belief_checkpoint);
  ModelBundle models{std::move(catalog),
                     std::move(histories),
                     rec::EmbeddingStore::restore(rec_ckpt),
                     rec_ckpt.get(kAttributeTable),
                     rec::RecommendationNet::restore(rec_ckpt),
                     belief::BeliefTracker::restore(btn_ckpt),
                     std::move(popularity)};
  models.validate();
  return models;
}

}  // namespace convrec::dialogue
