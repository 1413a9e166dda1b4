// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "convrec/datasets/catalog.hpp"
#include "convrec/datasets/history.hpp"
#include "convrec/datasets/interactions.hpp"
#include "convrec/datasets/split.hpp"

namespace convrec::data {

/// Contents of a dataset manifest (JSON):
///   {
///     "item_attributes": "items.tsv",         // item-id, attribute-id
///     "interactions":    "interactions.tsv",  // user-id, item-id, value
///     "attribute_names": "attributes.tsv",    // optional: attribute-id, name
///     "history_policy":  "latest" | "most-frequent",
///     "history_length":  5                    // optional
///   }
/// Relative paths resolve against the manifest's directory.
struct DatasetManifest {
  std::filesystem::path item_attributes;
  std::filesystem::path interactions;
  std::filesystem::path attribute_names;
  HistoryPolicy history_policy = HistoryPolicy::kLatest;
  std::size_t history_length = kDefaultHistoryLength;

  static DatasetManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// A loaded, split dataset. Histories are selected from the training split.
struct Dataset {
  ItemCatalog catalog;
  InteractionLog log;
  Splits splits;
  std::vector<UserHistory> histories;
  std::size_t history_length = kDefaultHistoryLength;
};

Dataset load_dataset(const DatasetManifest& manifest, const SplitConfig& split);
Dataset make_dataset(ItemCatalog catalog, InteractionLog log, const SplitConfig& split,
                     HistoryPolicy policy, std::size_t history_length = kDefaultHistoryLength);

}  // namespace convrec::data
