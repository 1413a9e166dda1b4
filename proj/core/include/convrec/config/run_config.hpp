// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "convrec/belief/belief_tracker.hpp"
#include "convrec/belief/training.hpp"
#include "convrec/datasets/history.hpp"
#include "convrec/datasets/split.hpp"
#include "convrec/dialogue/policy.hpp"
#include "convrec/recommender/recommendation_net.hpp"
#include "convrec/recommender/training.hpp"

namespace convrec::config {

struct SimulationConfig {
  std::string strategy = "minicorn";
  std::string ranker = "rn";
  std::size_t episodes = 0;  // 0: one per held-out interaction
  std::size_t jobs = 1;
  bool transcripts = true;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t session_ttl_minutes = 30;
};

/// Every knob of a run. Defaults follow the reference hyperparameters; the
/// seed fans out to the split, both trainers and the simulator.
struct RunConfig {
  std::filesystem::path dataset;  // manifest; relative to the config file
  std::uint64_t seed = 123;
  std::optional<data::HistoryPolicy> history_policy;  // overrides the manifest
  std::optional<std::size_t> history_length;
  data::SplitConfig split;
  dialogue::PolicyConfig policy;
  std::size_t embedding_dim = 64;
  rec::RnArchitecture rn;
  belief::BtnArchitecture btn;
  rec::RnTrainingConfig train_rn;
  belief::BtnTrainingConfig train_btn;
  SimulationConfig simulation;
  ServiceConfig service;

  /// Unknown keys and ill-typed or out-of-range values throw ConfigError
  /// naming the field ("policy.alpha").
  static RunConfig from_json(const nlohmann::json& j,
                             const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Range checks; throws ConfigError naming the field.
  void validate() const;
  /// Copies `seed` into every seeded sub-config.
  void apply_seed(std::uint64_t value);
};

}  // namespace convrec::config
