// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "convrec/belief/belief_tracker.hpp"
#include "convrec/datasets/catalog.hpp"
#include "convrec/datasets/dataset.hpp"
#include "convrec/datasets/synthetic.hpp"
#include "convrec/dialogue/models.hpp"
#include "convrec/recommender/attributes.hpp"
#include "convrec/recommender/embedding_store.hpp"
#include "convrec/recommender/recommendation_net.hpp"
#include "convrec/rng.hpp"

namespace fixtures {

inline convrec::rec::RnArchitecture tiny_rn() {
  return {.block1_channels = 3, .block2_channels = 4, .kernel = 3, .trunk_hidden = 16,
          .head_hidden1 = 16, .head_hidden2 = 8};
}

inline convrec::belief::BtnArchitecture tiny_btn(double dropout = 0.1) {
  return {.conv_channels = 3, .kernel = 3, .history_units = 16, .hidden1 = 24, .hidden2 = 32,
          .dropout = dropout};
}

inline convrec::data::ItemCatalog catalog_from(
    const std::vector<std::vector<int>>& item_attributes, std::size_t num_attributes) {
  std::vector<std::string> names;
  std::vector<std::vector<convrec::AttributeId>> attrs;
  for (std::size_t v = 0; v < item_attributes.size(); ++v) {
    names.push_back("item" + std::to_string(v));
    attrs.emplace_back();
    for (int p : item_attributes[v]) attrs.back().push_back(convrec::AttributeId(p));
  }
  return {names, attrs, num_attributes};
}

inline convrec::data::Dataset small_dataset(std::uint64_t seed = 5, std::size_t items = 40,
                                            std::size_t attributes = 6, std::size_t users = 20) {
  convrec::data::SyntheticWorldConfig cfg;
  cfg.items = items;
  cfg.attributes = attributes;
  cfg.clusters = 3;
  cfg.users = users;
  cfg.interactions_per_user = 8;
  cfg.seed = seed;
  auto world = convrec::data::generate_world(cfg);
  return convrec::data::make_dataset(std::move(world.catalog), std::move(world.log),
                                     convrec::data::SplitConfig{},
                                     convrec::data::HistoryPolicy::kLatest);
}

inline std::vector<double> random_vector(std::size_t n, convrec::Rng& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * convrec::uniform01(rng);
  return v;
}

/// Untrained models, small enough for exhaustive tests.
inline std::shared_ptr<const convrec::dialogue::ModelBundle> tiny_bundle(
    convrec::data::ItemCatalog catalog, std::vector<convrec::data::UserHistory> histories,
    std::vector<std::size_t> popularity, std::uint64_t seed = 9, double dropout = 0.1,
    std::size_t dim = 8) {
  auto store = convrec::rec::EmbeddingStore::random(histories.size(), catalog.num_items(), dim,
                                                    seed);
  auto attr = convrec::rec::refresh_attribute_embeddings(store, catalog);
  convrec::rec::RecommendationNet rn(3, dim, tiny_rn(), seed);
  convrec::belief::BeliefTracker btn(catalog.num_attributes(), 3, dim, tiny_btn(dropout), seed);
  if (popularity.empty()) popularity.assign(catalog.num_items(), 0);
  auto bundle = std::make_shared<convrec::dialogue::ModelBundle>(convrec::dialogue::ModelBundle{
      std::move(catalog), std::move(histories), std::move(store), std::move(attr), std::move(rn),
      std::move(btn), std::move(popularity)});
  bundle->validate();
  return bundle;
}

inline std::shared_ptr<const convrec::dialogue::ModelBundle> tiny_bundle(
    const convrec::data::Dataset& ds, std::uint64_t seed = 9, double dropout = 0.1) {
  std::vector<std::size_t> popularity(ds.catalog.num_items(), 0);
  for (const auto& r : ds.splits.train.records) ++popularity[r.item.index()];
  return tiny_bundle(ds.catalog, ds.histories, std::move(popularity), seed, dropout);
}

/// One user with an empty history.
inline std::shared_ptr<const convrec::dialogue::ModelBundle> tiny_bundle(
    convrec::data::ItemCatalog catalog, std::vector<std::size_t> popularity = {}) {
  return tiny_bundle(std::move(catalog), {convrec::data::UserHistory{convrec::UserId(0), {}}},
                     std::move(popularity));
}

}  // namespace fixtures
