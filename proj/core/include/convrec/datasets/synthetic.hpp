// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "convrec/datasets/catalog.hpp"
#include "convrec/datasets/interactions.hpp"

namespace convrec::data {

/// Generator for small worlds with planted attribute co-occurrence.
///
/// Items belong to latent clusters. Each cluster has a prototype attribute
/// profile: every attribute is "core" for the cluster with probability
/// `core_fraction`; items then carry each core attribute with probability
/// `core_prob` and each other attribute with probability `noise_prob`.
/// Users prefer one cluster and draw `affinity` of their interactions from it
/// (the rest uniformly). Interaction values are increasing timestamps.
struct SyntheticWorldConfig {
  std::size_t items = 200;
  std::size_t attributes = 12;
  std::size_t clusters = 6;
  std::size_t users = 120;
  std::size_t interactions_per_user = 20;
  double core_fraction = 0.35;
  double core_prob = 0.9;
  double noise_prob = 0.08;
  /// The first `common_attributes` attributes ignore the clusters: every item
  /// carries each of them with probability `common_prob`.
  std::size_t common_attributes = 0;
  double common_prob = 0.9;
  double affinity = 0.8;
  std::uint64_t seed = 123;
};

struct SyntheticWorld {
  ItemCatalog catalog;
  InteractionLog log;
  std::vector<std::size_t> item_cluster;
  std::vector<std::size_t> user_cluster;
};

SyntheticWorld generate_world(const SyntheticWorldConfig& config);

/// Pearson correlation matrix (P x P, row-major) of the attribute columns of
/// b(v) over `sample` (all catalog items when empty; repeats count).
/// Constant columns get zero correlation off the diagonal.
std::vector<double> attribute_correlation(const ItemCatalog& catalog,
                                          std::span<const ItemId> sample = {});

/// Writes items.tsv, interactions.tsv, attributes.tsv and manifest.json.
std::filesystem::path write_world(const SyntheticWorld& world, const std::filesystem::path& dir);

}  // namespace convrec::data
