// SPDX-License-Identifier: Apache-2.0
#include "convrec/belief/belief_tracker.hpp"

#include <string>

#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::belief {
namespace {

using nn::LayerSpec;

std::vector<LayerSpec> btn_specs(std::size_t p, std::size_t dim, const BtnArchitecture& a) {
  return {LayerSpec::conv2d(a.conv_channels, a.kernel, 1),
          LayerSpec::relu(),
          LayerSpec::conv2d(a.conv_channels, a.kernel, 1),
          LayerSpec::relu(),
          LayerSpec::flatten(),
          LayerSpec::dense(a.history_units),
          LayerSpec::relu(),
          LayerSpec::dropout(a.dropout),
          LayerSpec::concat(0, dim),
          LayerSpec::dense(a.hidden1),
          LayerSpec::relu(),
          LayerSpec::dropout(a.dropout),
          LayerSpec::dense(a.hidden2),
          LayerSpec::relu(),
          LayerSpec::dropout(a.dropout),
          LayerSpec::dense(p * p)};
}

nlohmann::json arch_json(const BtnArchitecture& a) {
  return {{"conv_channels", a.conv_channels}, {"kernel", a.kernel},
          {"history_units", a.history_units}, {"hidden1", a.hidden1},
          {"hidden2", a.hidden2},             {"dropout", a.dropout}};
}

BtnArchitecture arch_from_json(const nlohmann::json& j) {
  BtnArchitecture a;
  a.conv_channels = j.at("conv_channels").get<std::size_t>();
  a.kernel = j.at("kernel").get<std::size_t>();
  a.history_units = j.at("history_units").get<std::size_t>();
  a.hidden1 = j.at("hidden1").get<std::size_t>();
  a.hidden2 = j.at("hidden2").get<std::size_t>();
  a.dropout = j.at("dropout").get<double>();
  return a;
}

}  // namespace

BeliefTracker::BeliefTracker(std::size_t num_attributes, std::size_t history_rows,
                             std::size_t embedding_dim, const BtnArchitecture& arch,
                             std::uint64_t seed)
    : num_attributes_(num_attributes),
      history_rows_(history_rows),
      embedding_dim_(embedding_dim),
      arch_(arch) {
  if (num_attributes == 0) throw ConfigError("belief tracker needs at least one attribute");
  if (history_rows == 0) throw ConfigError("belief tracker needs at least one history row");
  if (embedding_dim == 0) throw ConfigError("embedding dimension must be positive");
  Rng init(derive_seed(seed, {2}));
  net_ = nn::Network({1, history_rows, num_attributes},
                     btn_specs(num_attributes, embedding_dim, arch), init);
}

RelationMatrix BeliefTracker::relation_matrix(std::span<const double> user_embedding,
                                              const nn::Tensor& history_attributes,
                                              nn::Mode mode, Rng* rng,
                                              nn::ForwardCache* cache) const {
  if (history_attributes.size() != history_rows_ * num_attributes_) {
    throw ConfigError("history attribute matrix has shape " +
                      nn::shape_string(history_attributes.shape()) + ", expected [" +
                      std::to_string(history_rows_) + ", " + std::to_string(num_attributes_) +
                      "]");
  }
  if (user_embedding.size() != embedding_dim_) {
    throw ConfigError("user embedding has " + std::to_string(user_embedding.size()) +
                      " values, expected " + std::to_string(embedding_dim_));
  }
  nn::Tensor x = history_attributes;
  x.reshape({1, history_rows_, num_attributes_});
  const nn::Tensor e({embedding_dim_}, {user_embedding.begin(), user_embedding.end()});
  const nn::Tensor raw = net_.forward(x, {&e, 1}, mode, rng, cache);
  return RelationMatrix::from_raw(raw.values(), num_attributes_);
}

std::vector<double> BeliefTracker::beliefs(std::span<const double> user_embedding,
                                           const nn::Tensor& history_attributes,
                                           std::span<const double> feedback, nn::Mode mode,
                                           Rng* rng) const {
  return predict_beliefs(relation_matrix(user_embedding, history_attributes, mode, rng),
                         feedback);
}

void BeliefTracker::store(nn::Checkpoint& checkpoint) const {
  checkpoint.meta["btn"] = {{"num_attributes", num_attributes_},
                            {"history_rows", history_rows_},
                            {"embedding_dim", embedding_dim_},
                            {"architecture", arch_json(arch_)}};
  nn::store_network(checkpoint, "btn/net", net_);
}

BeliefTracker BeliefTracker::restore(const nn::Checkpoint& checkpoint) {
  if (!checkpoint.meta.contains("btn")) throw LookupError("checkpoint has no belief tracker");
  const auto& meta = checkpoint.meta.at("btn");
  BeliefTracker t;
  t.num_attributes_ = meta.at("num_attributes").get<std::size_t>();
  t.history_rows_ = meta.at("history_rows").get<std::size_t>();
  t.embedding_dim_ = meta.at("embedding_dim").get<std::size_t>();
  t.arch_ = arch_from_json(meta.at("architecture"));
  t.net_ = nn::restore_network(checkpoint, "btn/net");
  if (t.net_.input_shape() != nn::Shape{1, t.history_rows_, t.num_attributes_}) {
    throw ConfigError("checkpoint belief network input shape does not match its metadata");
  }
  return t;
}

}  // namespace convrec::belief
