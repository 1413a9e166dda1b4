// SPDX-License-Identifier: Apache-2.0
#include "convrec/recommender/recommendation_net.hpp"

#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::rec {
namespace {

using nn::LayerSpec;

std::vector<LayerSpec> trunk_specs(std::size_t dim, const RnArchitecture& arch) {
  return {LayerSpec::residual(arch.block1_channels, arch.kernel, 1),
          LayerSpec::residual(arch.block2_channels, arch.kernel, 2),
          LayerSpec::flatten(),
          LayerSpec::concat(0, dim),
          LayerSpec::dense(arch.trunk_hidden),
          LayerSpec::relu(),
          LayerSpec::dense(dim)};
}

std::vector<LayerSpec> head_specs(std::size_t dim, const RnArchitecture& arch) {
  return {LayerSpec::concat(0, dim),       LayerSpec::dense(arch.head_hidden1), LayerSpec::relu(),
          LayerSpec::dense(arch.head_hidden2), LayerSpec::relu(),               LayerSpec::dense(1)};
}

nlohmann::json arch_json(const RnArchitecture& a) {
  return {{"block1_channels", a.block1_channels}, {"block2_channels", a.block2_channels},
          {"kernel", a.kernel},                   {"trunk_hidden", a.trunk_hidden},
          {"head_hidden1", a.head_hidden1},       {"head_hidden2", a.head_hidden2}};
}

RnArchitecture arch_from_json(const nlohmann::json& j) {
  RnArchitecture a;
  a.block1_channels = j.at("block1_channels").get<std::size_t>();
  a.block2_channels = j.at("block2_channels").get<std::size_t>();
  a.kernel = j.at("kernel").get<std::size_t>();
  a.trunk_hidden = j.at("trunk_hidden").get<std::size_t>();
  a.head_hidden1 = j.at("head_hidden1").get<std::size_t>();
  a.head_hidden2 = j.at("head_hidden2").get<std::size_t>();
  return a;
}

}  // namespace

RecommendationNet::RecommendationNet(std::size_t history_rows, std::size_t embedding_dim,
                                     const RnArchitecture& arch, std::uint64_t seed)
    : history_rows_(history_rows), embedding_dim_(embedding_dim), arch_(arch) {
  if (embedding_dim == 0) throw ConfigError("embedding dimension must be positive");
  Rng trunk_init(derive_seed(seed, {0}));
  Rng head_init(derive_seed(seed, {1}));
  trunk_ = nn::Network({1, history_rows + 1, embedding_dim}, trunk_specs(embedding_dim, arch),
                       trunk_init);
  head_ = nn::Network({embedding_dim}, head_specs(embedding_dim, arch), head_init);
}

nn::Tensor RecommendationNet::preference(const nn::Tensor& image,
                                         std::span<const double> belief_embedding,
                                         nn::ForwardCache* cache) const {
  if (image.size() != (history_rows_ + 1) * embedding_dim_) {
    throw ConfigError("preference image has shape " + nn::shape_string(image.shape()) +
                      ", expected [" + std::to_string(history_rows_ + 1) + ", " +
                      std::to_string(embedding_dim_) + "]");
  }
  if (belief_embedding.size() != embedding_dim_) {
    throw ConfigError("belief embedding has " + std::to_string(belief_embedding.size()) +
                      " values, expected " + std::to_string(embedding_dim_));
  }
  nn::Tensor x = image;
  x.reshape({1, history_rows_ + 1, embedding_dim_});
  const nn::Tensor o({embedding_dim_}, {belief_embedding.begin(), belief_embedding.end()});
  return trunk_.forward(x, {&o, 1}, nn::Mode::kEval, nullptr, cache);
}

double RecommendationNet::score_item(const nn::Tensor& preference,
                                     std::span<const double> item_embedding,
                                     nn::ForwardCache* cache) const {
  if (item_embedding.size() != embedding_dim_) {
    throw ConfigError("item embedding has " + std::to_string(item_embedding.size()) +
                      " values, expected " + std::to_string(embedding_dim_));
  }
  const nn::Tensor e({embedding_dim_}, {item_embedding.begin(), item_embedding.end()});
  return head_.forward(preference, {&e, 1}, nn::Mode::kEval, nullptr, cache)[0];
}

void RecommendationNet::store(nn::Checkpoint& checkpoint) const {
  checkpoint.meta["rn"] = {{"history_rows", history_rows_},
                           {"embedding_dim", embedding_dim_},
                           {"architecture", arch_json(arch_)}};
  nn::store_network(checkpoint, "rn/trunk", trunk_);
  nn::store_network(checkpoint, "rn/head", head_);
}

RecommendationNet RecommendationNet::restore(const nn::Checkpoint& checkpoint) {
  if (!checkpoint.meta.contains("rn")) throw LookupError("checkpoint has no recommendation net");
  const auto& meta = checkpoint.meta.at("rn");
  RecommendationNet net;
  net.history_rows_ = meta.at("history_rows").get<std::size_t>();
  net.embedding_dim_ = meta.at("embedding_dim").get<std::size_t>();
  net.arch_ = arch_from_json(meta.at("architecture"));
  net.trunk_ = nn::restore_network(checkpoint, "rn/trunk");
  net.head_ = nn::restore_network(checkpoint, "rn/head");
  if (net.trunk_.input_shape() != nn::Shape{1, net.history_rows_ + 1, net.embedding_dim_}) {
    throw ConfigError("checkpoint trunk input shape does not match its metadata");
  }
  return net;
}

}  // namespace convrec::rec
