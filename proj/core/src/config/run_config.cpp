// SPDX-License-Identifier: Apache-2.0
#include "convrec/config/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <type_traits>

#include "convrec/errors.hpp"
#include "convrec/simulation/strategies.hpp"

namespace convrec::config {

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers can
// be reported as unknown fields.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    const std::string field = name(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(field + ": expected true or false");
      out = it->template get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer() ||
          (!it->is_number_unsigned() && it->template get<std::int64_t>() < 0)) {
        throw ConfigError(field + ": expected a non-negative integer, got " + it->dump());
      }
      out = static_cast<T>(it->template get<std::uint64_t>());
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(field + ": expected a number, got " + it->dump());
      out = it->template get<double>();
    } else {
      if (!it->is_string()) throw ConfigError(field + ": expected a string, got " + it->dump());
      out = it->template get<std::string>();
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() || it->is_null() ? empty : *it, name(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(name(key.c_str()) + ": unknown field");
    }
  }

 private:
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  Section root(j, "");
  std::string dataset;
  root.read("dataset", dataset);
  if (!dataset.empty()) {
    c.dataset = dataset;
    if (c.dataset.is_relative() && !base_dir.empty()) c.dataset = base_dir / c.dataset;
  }
  root.read("seed", c.seed);
  std::string policy_name;
  root.read("history_policy", policy_name);
  if (!policy_name.empty()) {
    try {
      c.history_policy = data::history_policy_from_string(policy_name);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("history_policy: ") + e.what());
    }
  }
  if (j.contains("history_length")) {
    std::size_t k = 0;
    root.read("history_length", k);
    c.history_length = k;
  }

  auto split = root.child("split");
  split.read("train", c.split.train);
  split.read("validation", c.split.validation);
  split.read("test", c.split.test);
  split.finish();

  auto policy = root.child("policy");
  policy.read("alpha", c.policy.alpha);
  policy.read("slate_size", c.policy.slate_size);
  policy.read("max_turns", c.policy.max_turns);
  policy.read("mc_passes", c.policy.mc_passes);
  policy.finish();

  auto model = root.child("model");
  model.read("embedding_dim", c.embedding_dim);
  auto rn = model.child("rn");
  rn.read("block1_channels", c.rn.block1_channels);
  rn.read("block2_channels", c.rn.block2_channels);
  rn.read("kernel", c.rn.kernel);
  rn.read("trunk_hidden", c.rn.trunk_hidden);
  rn.read("head_hidden1", c.rn.head_hidden1);
  rn.read("head_hidden2", c.rn.head_hidden2);
  rn.finish();
  auto btn = model.child("btn");
  btn.read("conv_channels", c.btn.conv_channels);
  btn.read("kernel", c.btn.kernel);
  btn.read("history_units", c.btn.history_units);
  btn.read("hidden1", c.btn.hidden1);
  btn.read("hidden2", c.btn.hidden2);
  btn.read("dropout", c.btn.dropout);
  btn.finish();
  model.finish();

  auto trn = root.child("train_rn");
  trn.read("epochs", c.train_rn.epochs);
  trn.read("batch_size", c.train_rn.batch_size);
  trn.read("learning_rate", c.train_rn.learning_rate);
  trn.read("min_learning_rate", c.train_rn.min_learning_rate);
  trn.read("margin", c.train_rn.margin);
  trn.read("mask_rate", c.train_rn.mask_rate);
  trn.read("refresh_every", c.train_rn.refresh_every);
  trn.finish();

  auto tbtn = root.child("train_btn");
  tbtn.read("epochs", c.train_btn.epochs);
  tbtn.read("batch_size", c.train_btn.batch_size);
  tbtn.read("learning_rate", c.train_btn.learning_rate);
  tbtn.read("min_learning_rate", c.train_btn.min_learning_rate);
  tbtn.read("mask_rate", c.train_btn.mask_rate);
  tbtn.read("gradient_clip", c.train_btn.gradient_clip);
  tbtn.finish();

  auto sim = root.child("simulation");
  sim.read("strategy", c.simulation.strategy);
  sim.read("ranker", c.simulation.ranker);
  sim.read("episodes", c.simulation.episodes);
  sim.read("jobs", c.simulation.jobs);
  sim.read("transcripts", c.simulation.transcripts);
  sim.finish();

  auto svc = root.child("service");
  svc.read("host", c.service.host);
  std::size_t port = static_cast<std::size_t>(c.service.port);
  svc.read("port", port);
  require(port <= 65535, "service.port", "must be at most 65535");
  c.service.port = static_cast<int>(port);
  svc.read("session_ttl_minutes", c.service.session_ttl_minutes);
  svc.finish();

  root.finish();
  c.apply_seed(c.seed);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void RunConfig::apply_seed(std::uint64_t value) {
  seed = value;
  split.seed = value;
  train_rn.seed = value;
  train_btn.seed = value;
}

void RunConfig::validate() const {
  try {
    split.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("split: ") + e.what());
  }
  require(policy.alpha >= 0.0 && policy.alpha <= 0.5, "policy.alpha", "must lie in [0, 0.5]");
  require(policy.slate_size >= 1, "policy.slate_size", "must be >= 1");
  require(policy.max_turns >= 2, "policy.max_turns", "must be >= 2");
  require(policy.mc_passes >= 1, "policy.mc_passes", "must be >= 1");
  require(embedding_dim >= 1, "model.embedding_dim", "must be >= 1");
  require(rn.block1_channels >= 1 && rn.block2_channels >= 1 && rn.trunk_hidden >= 1 &&
              rn.head_hidden1 >= 1 && rn.head_hidden2 >= 1,
          "model.rn", "layer widths must be >= 1");
  require(rn.kernel % 2 == 1, "model.rn.kernel", "must be odd");
  require(btn.conv_channels >= 1 && btn.history_units >= 1 && btn.hidden1 >= 1 &&
              btn.hidden2 >= 1,
          "model.btn", "layer widths must be >= 1");
  require(btn.kernel % 2 == 1, "model.btn.kernel", "must be odd");
  require(btn.dropout >= 0.0 && btn.dropout < 1.0, "model.btn.dropout", "must lie in [0, 1)");
  require(train_rn.batch_size >= 1, "train_rn.batch_size", "must be >= 1");
  require(train_rn.learning_rate > 0.0, "train_rn.learning_rate", "must be positive");
  require(train_rn.min_learning_rate >= 0.0 &&
              train_rn.min_learning_rate <= train_rn.learning_rate,
          "train_rn.min_learning_rate", "must lie in [0, learning_rate]");
  require(train_rn.margin > 0.0, "train_rn.margin", "must be positive");
  require(train_rn.mask_rate >= 0.0 && train_rn.mask_rate <= 1.0, "train_rn.mask_rate",
          "must lie in [0, 1]");
  require(train_rn.refresh_every >= 1, "train_rn.refresh_every", "must be >= 1");
  require(train_btn.batch_size >= 1, "train_btn.batch_size", "must be >= 1");
  require(train_btn.learning_rate > 0.0, "train_btn.learning_rate", "must be positive");
  require(train_btn.min_learning_rate >= 0.0 &&
              train_btn.min_learning_rate <= train_btn.learning_rate,
          "train_btn.min_learning_rate", "must lie in [0, learning_rate]");
  require(train_btn.mask_rate >= 0.0 && train_btn.mask_rate <= 1.0, "train_btn.mask_rate",
          "must lie in [0, 1]");
  require(train_btn.gradient_clip > 0.0, "train_btn.gradient_clip", "must be positive");
  require(!history_length || *history_length >= 1, "history_length", "must be >= 1");
  require(simulation.jobs >= 1, "simulation.jobs", "must be >= 1");
  {
    const auto names = sim::strategy_names();
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + std::string(n);
    require(std::find(names.begin(), names.end(), simulation.strategy) != names.end(),
            "simulation.strategy", "unknown strategy '" + simulation.strategy + "' (one of " +
                                       list + ")");
  }
  require(simulation.ranker == "rn" || simulation.ranker == "toppop", "simulation.ranker",
          "must be rn or toppop");
  require(service.port >= 1, "service.port", "must be in 1..65535");
  require(service.session_ttl_minutes >= 1, "service.session_ttl_minutes", "must be >= 1");
}

nlohmann::json RunConfig::to_json() const {
  json j{
      {"dataset", dataset.string()},
      {"seed", seed},
      {"split", {{"train", split.train}, {"validation", split.validation}, {"test", split.test}}},
      {"policy",
       {{"alpha", policy.alpha},
        {"slate_size", policy.slate_size},
        {"max_turns", policy.max_turns},
        {"mc_passes", policy.mc_passes}}},
      {"model",
       {{"embedding_dim", embedding_dim},
        {"rn",
         {{"block1_channels", rn.block1_channels},
          {"block2_channels", rn.block2_channels},
          {"kernel", rn.kernel},
          {"trunk_hidden", rn.trunk_hidden},
          {"head_hidden1", rn.head_hidden1},
          {"head_hidden2", rn.head_hidden2}}},
        {"btn",
         {{"conv_channels", btn.conv_channels},
          {"kernel", btn.kernel},
          {"history_units", btn.history_units},
          {"hidden1", btn.hidden1},
          {"hidden2", btn.hidden2},
          {"dropout", btn.dropout}}}}},
      {"train_rn",
       {{"epochs", train_rn.epochs},
        {"batch_size", train_rn.batch_size},
        {"learning_rate", train_rn.learning_rate},
        {"min_learning_rate", train_rn.min_learning_rate},
        {"margin", train_rn.margin},
        {"mask_rate", train_rn.mask_rate},
        {"refresh_every", train_rn.refresh_every}}},
      {"train_btn",
       {{"epochs", train_btn.epochs},
        {"batch_size", train_btn.batch_size},
        {"learning_rate", train_btn.learning_rate},
        {"min_learning_rate", train_btn.min_learning_rate},
        {"mask_rate", train_btn.mask_rate},
        {"gradient_clip", train_btn.gradient_clip}}},
      {"simulation",
       {{"strategy", simulation.strategy},
        {"ranker", simulation.ranker},
        {"episodes", simulation.episodes},
        {"jobs", simulation.jobs},
        {"transcripts", simulation.transcripts}}},
      {"service",
       {{"host", service.host},
        {"port", service.port},
        {"session_ttl_minutes", service.session_ttl_minutes}}},
  };
  if (history_policy) j["history_policy"] = std::string(data::to_string(*history_policy));
  if (history_length) j["history_length"] = *history_length;
  return j;
}

}  // namespace convrec::config
