// SPDX-License-Identifier: Apache-2.0
#include "convrec/datasets/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "convrec/datasets/dataset.hpp"
#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::data {

SyntheticWorld generate_world(const SyntheticWorldConfig& config) {
  if (config.common_attributes > config.attributes) {
    throw ConfigError("synthetic world: common_attributes exceeds attributes");
  }
  if (config.items == 0 || config.attributes == 0 || config.clusters == 0 || config.users == 0) {
    throw ConfigError("synthetic world: items, attributes, clusters and users must be >= 1");
  }
  Rng rng(config.seed);
  SyntheticWorld world;

  std::vector<std::vector<bool>> core(config.clusters, std::vector<bool>(config.attributes));
  for (auto& profile : core) {
    bool any = false;
    for (std::size_t p = 0; p < config.attributes; ++p) {
      profile[p] = uniform01(rng) < config.core_fraction;
      any = any || profile[p];
    }
    if (!any) profile[uniform_index(rng, config.attributes)] = true;
  }

  std::vector<std::vector<std::size_t>> members(config.clusters);
  std::vector<std::vector<AttributeId>> attrs(config.items);
  for (std::size_t v = 0; v < config.items; ++v) {
    const std::size_t c = uniform_index(rng, config.clusters);
    world.item_cluster.push_back(c);
    members[c].push_back(v);
    for (std::size_t p = 0; p < config.attributes; ++p) {
      double prob = core[c][p] ? config.core_prob : config.noise_prob;
      if (p < config.common_attributes) prob = config.common_prob;
      if (uniform01(rng) < prob) attrs[v].push_back(AttributeId(p));
    }
    if (attrs[v].empty()) {
      std::vector<std::size_t> pool;
      for (std::size_t p = 0; p < config.attributes; ++p) {
        if (core[c][p]) pool.push_back(p);
      }
      attrs[v].push_back(AttributeId(pool[uniform_index(rng, pool.size())]));
    }
  }
  std::vector<std::string> item_names;
  for (std::size_t v = 0; v < config.items; ++v) item_names.push_back("i" + std::to_string(v));
  world.catalog = ItemCatalog(std::move(item_names), std::move(attrs), config.attributes);

  for (std::size_t u = 0; u < config.users; ++u) {
    std::size_t c = uniform_index(rng, config.clusters);
    while (members[c].empty()) c = (c + 1) % config.clusters;
    world.user_cluster.push_back(c);
    world.log.user_names.push_back("u" + std::to_string(u));
    std::set<std::size_t> seen;
    const std::size_t budget = std::min(config.interactions_per_user, config.items);
    for (std::size_t i = 0; i < budget; ++i) {
      std::size_t v = 0;
      for (int attempt = 0; attempt < 64; ++attempt) {
        v = uniform01(rng) < config.affinity ? members[c][uniform_index(rng, members[c].size())]
                                             : uniform_index(rng, config.items);
        if (!seen.count(v)) break;
      }
      if (!seen.insert(v).second) continue;
      world.log.records.push_back({UserId(u), ItemId(v), static_cast<double>(i + 1)});
    }
  }
  return world;
}

std::vector<double> attribute_correlation(const ItemCatalog& catalog,
                                          std::span<const ItemId> sample) {
  const std::size_t p = catalog.num_attributes();
  std::vector<ItemId> items(sample.begin(), sample.end());
  if (items.empty()) {
    for (std::size_t v = 0; v < catalog.num_items(); ++v) items.emplace_back(v);
  }
  const double n = static_cast<double>(items.size());
  std::vector<double> mean(p, 0.0);
  std::vector<std::vector<double>> cols(p, std::vector<double>(items.size(), 0.0));
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (AttributeId a : catalog.attributes_of(items[i])) cols[a.index()][i] = 1.0;
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (double x : cols[a]) mean[a] += x;
    mean[a] /= n;
  }
  std::vector<double> corr(p * p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double sab = 0, saa = 0, sbb = 0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        const double da = cols[a][i] - mean[a];
        const double db = cols[b][i] - mean[b];
        sab += da * db;
        saa += da * da;
        sbb += db * db;
      }
      double r = 0.0;
      if (a == b) {
        r = 1.0;
      } else if (saa > 0 && sbb > 0) {
        r = sab / std::sqrt(saa * sbb);
      }
      corr[a * p + b] = corr[b * p + a] = r;
    }
  }
  return corr;
}

std::filesystem::path write_world(const SyntheticWorld& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_catalog(world.catalog, dir / "items.tsv");
  write_interactions(world.log, world.catalog, dir / "interactions.tsv");
  {
    std::ofstream out(dir / "attributes.tsv");
    out << "# attribute-id\tname\n";
    for (std::size_t p = 0; p < world.catalog.num_attributes(); ++p) {
      out << p << '\t' << world.catalog.attribute_name(AttributeId(p)) << '\n';
    }
  }
  DatasetManifest manifest;
  manifest.item_attributes = "items.tsv";
  manifest.interactions = "interactions.tsv";
  manifest.attribute_names = "attributes.tsv";
  manifest.history_policy = HistoryPolicy::kLatest;
  const auto path = dir / "manifest.json";
  manifest.save(path);
  return path;
}

}  // namespace convrec::data
