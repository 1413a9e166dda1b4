// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "convrec/belief/relation.hpp"
#include "convrec/nnkit/checkpoint.hpp"
#include "convrec/nnkit/network.hpp"

namespace convrec::belief {

/// Layer widths and MC-dropout rate. Defaults follow the reference
/// architecture.
struct BtnArchitecture {
  std::size_t conv_channels = 64;
  std::size_t kernel = 3;
  std::size_t history_units = 128;
  std::size_t hidden1 = 512;
  std::size_t hidden2 = 1024;
  double dropout = 0.1;

  friend bool operator==(const BtnArchitecture&, const BtnArchitecture&) = default;
};

/// Belief tracking network: (user embedding, B_u) -> relation matrix A, and
/// q = clamp(A a, 0, 1).
///
/// B_u [rows, P] -> conv(c) -> relu -> conv(c) -> relu -> flatten
///   -> dense(history_units) -> relu -> dropout -> concat(e_user)
///   -> dense(hidden1) -> relu -> dropout -> dense(hidden2) -> relu -> dropout
///   -> dense(P*P) = R, A = sym(R) with unit diagonal.
class BeliefTracker {
 public:
  BeliefTracker() = default;
  BeliefTracker(std::size_t num_attributes, std::size_t history_rows, std::size_t embedding_dim,
                const BtnArchitecture& arch, std::uint64_t seed);

  std::size_t num_attributes() const noexcept { return num_attributes_; }
  std::size_t history_rows() const noexcept { return history_rows_; }
  std::size_t embedding_dim() const noexcept { return embedding_dim_; }
  const BtnArchitecture& architecture() const noexcept { return arch_; }

  /// Throws ConfigError unless B_u is [history_rows, P] and the embedding has
  /// embedding_dim values. kEval is deterministic; kTrain/kMcDropout need `rng`.
  RelationMatrix relation_matrix(std::span<const double> user_embedding,
                                 const nn::Tensor& history_attributes, nn::Mode mode,
                                 Rng* rng = nullptr, nn::ForwardCache* cache = nullptr) const;

  std::vector<double> beliefs(std::span<const double> user_embedding,
                              const nn::Tensor& history_attributes,
                              std::span<const double> feedback, nn::Mode mode = nn::Mode::kEval,
                              Rng* rng = nullptr) const;

  nn::Network& network() noexcept { return net_; }
  const nn::Network& network() const noexcept { return net_; }

  void store(nn::Checkpoint& checkpoint) const;
  static BeliefTracker restore(const nn::Checkpoint& checkpoint);

 private:
  std::size_t num_attributes_ = 0;
  std::size_t history_rows_ = 0;
  std::size_t embedding_dim_ = 0;
  BtnArchitecture arch_;
  nn::Network net_;
};

}  // namespace convrec::belief
