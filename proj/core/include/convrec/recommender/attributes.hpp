// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "convrec/datasets/catalog.hpp"
#include "convrec/nnkit/tensor.hpp"
#include "convrec/recommender/embedding_store.hpp"

namespace convrec::rec {

/// E^attr as a [P, D] tensor: row p is the mean item embedding over V[p].
/// An attribute with no items gets a zero row and a message in `warnings`.
nn::Tensor refresh_attribute_embeddings(const EmbeddingStore& store,
                                        const data::ItemCatalog& catalog,
                                        std::vector<std::string>* warnings = nullptr);

/// o = sum_p q_p * E^attr_p.
std::vector<double> belief_embedding(std::span<const double> beliefs,
                                     const nn::Tensor& attribute_embeddings);

}  // namespace convrec::rec
