// SPDX-License-Identifier: Apache-2.0
#include "convrec/datasets/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "convrec/errors.hpp"

namespace convrec::data {

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const char* key, bool required) -> std::filesystem::path {
    if (!j.contains(key)) {
      if (required) throw ConfigError("manifest " + path.string() + ": missing field '" + key + "'");
      return {};
    }
    std::filesystem::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  DatasetManifest m;
  m.item_attributes = resolve("item_attributes", true);
  m.interactions = resolve("interactions", true);
  m.attribute_names = resolve("attribute_names", false);
  m.history_policy = history_policy_from_string(j.value("history_policy", std::string("latest")));
  m.history_length = j.value("history_length", kDefaultHistoryLength);
  if (m.history_length == 0) {
    throw ConfigError("manifest " + path.string() + ": history_length must be >= 1");
  }
  return m;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
  nlohmann::json j{{"item_attributes", item_attributes.string()},
                   {"interactions", interactions.string()},
                   {"history_policy", to_string(history_policy)},
                   {"history_length", history_length}};
  if (!attribute_names.empty()) j["attribute_names"] = attribute_names.string();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Dataset make_dataset(ItemCatalog catalog, InteractionLog log, const SplitConfig& split,
                     HistoryPolicy policy, std::size_t history_length) {
  Dataset d;
  d.catalog = std::move(catalog);
  d.log = std::move(log);
  d.splits = split_interactions(d.log, split);
  d.histories = select_histories(d.splits.train, history_length, policy);
  d.history_length = history_length;
  return d;
}

Dataset load_dataset(const DatasetManifest& manifest, const SplitConfig& split) {
  auto catalog = load_catalog(manifest.item_attributes, 0, manifest.attribute_names);
  auto log = load_interactions(manifest.interactions, catalog);
  return make_dataset(std::move(catalog), std::move(log), split, manifest.history_policy,
                      manifest.history_length);
}

}  // namespace convrec::data
