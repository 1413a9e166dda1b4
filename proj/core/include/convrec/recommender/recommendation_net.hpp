// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "convrec/nnkit/checkpoint.hpp"
#include "convrec/nnkit/network.hpp"

namespace convrec::rec {

/// Layer widths. Defaults follow the reference architecture; smaller values
/// are useful for tests and quick experiments.
struct RnArchitecture {
  std::size_t block1_channels = 64;
  std::size_t block2_channels = 128;
  std::size_t kernel = 3;
  std::size_t trunk_hidden = 256;
  std::size_t head_hidden1 = 256;
  std::size_t head_hidden2 = 128;

  friend bool operator==(const RnArchitecture&, const RnArchitecture&) = default;
};

/// Scores a user-item pair; lower is better.
///
/// trunk: image [1, history_rows + 1, D] (history item embeddings, then the
///        user embedding) -> residual(c1, stride 1) -> residual(c2, stride 2)
///        -> flatten -> concat(o) -> dense(trunk_hidden) -> relu -> dense(D) = s
/// head:  s -> concat(e_item) -> dense(h1) -> relu -> dense(h2) -> relu -> dense(1)
class RecommendationNet {
 public:
  RecommendationNet() = default;
  RecommendationNet(std::size_t history_rows, std::size_t embedding_dim,
                    const RnArchitecture& arch, std::uint64_t seed);

  std::size_t history_rows() const noexcept { return history_rows_; }
  std::size_t embedding_dim() const noexcept { return embedding_dim_; }
  const RnArchitecture& architecture() const noexcept { return arch_; }

  /// Preference summary s from the [rows+1, D] image and belief embedding o.
  nn::Tensor preference(const nn::Tensor& image, std::span<const double> belief_embedding,
                        nn::ForwardCache* cache = nullptr) const;
  double score_item(const nn::Tensor& preference, std::span<const double> item_embedding,
                    nn::ForwardCache* cache = nullptr) const;

  nn::Network& trunk() noexcept { return trunk_; }
  nn::Network& head() noexcept { return head_; }
  const nn::Network& trunk() const noexcept { return trunk_; }
  const nn::Network& head() const noexcept { return head_; }

  void store(nn::Checkpoint& checkpoint) const;
  static RecommendationNet restore(const nn::Checkpoint& checkpoint);

 private:
  std::size_t history_rows_ = 0;
  std::size_t embedding_dim_ = 0;
  RnArchitecture arch_;
  nn::Network trunk_;
  nn::Network head_;
};

}  // namespace convrec::rec
