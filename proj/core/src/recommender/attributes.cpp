// SPDX-License-Identifier: Apache-2.0
#include "convrec/recommender/attributes.hpp"

#include "convrec/errors.hpp"

namespace convrec::rec {

nn::Tensor refresh_attribute_embeddings(const EmbeddingStore& store,
                                        const data::ItemCatalog& catalog,
                                        std::vector<std::string>* warnings) {
  if (store.num_items() != catalog.num_items()) {
    throw ConfigError("embedding store has " + std::to_string(store.num_items()) +
                      " items, catalog has " + std::to_string(catalog.num_items()));
  }
  const std::size_t d = store.dim();
  nn::Tensor out({catalog.num_attributes(), d});
  for (std::size_t p = 0; p < catalog.num_attributes(); ++p) {
    const auto items = catalog.items_with(AttributeId(p));
    if (items.empty()) {
      if (warnings) {
        warnings->push_back("attribute " + std::to_string(p) +
                            " has no items; its embedding is zero");
      }
      continue;
    }
    auto row = out.row(p);
    for (ItemId v : items) {
      const auto e = store.item(v);
      for (std::size_t j = 0; j < d; ++j) row[j] += e[j];
    }
    const double inv = 1.0 / static_cast<double>(items.size());
    for (double& x : row) x *= inv;
  }
  return out;
}

std::vector<double> belief_embedding(std::span<const double> beliefs,
                                     const nn::Tensor& attribute_embeddings) {
  if (attribute_embeddings.rank() != 2 || attribute_embeddings.dim(0) != beliefs.size()) {
    throw ConfigError("belief vector of size " + std::to_string(beliefs.size()) +
                      " does not match attribute embeddings " +
                      nn::shape_string(attribute_embeddings.shape()));
  }
  const std::size_t d = attribute_embeddings.dim(1);
  std::vector<double> o(d, 0.0);
  for (std::size_t p = 0; p < beliefs.size(); ++p) {
    if (beliefs[p] == 0.0) continue;
    const auto row = attribute_embeddings.row(p);
    for (std::size_t j = 0; j < d; ++j) o[j] += beliefs[p] * row[j];
  }
  return o;
}

}  // namespace convrec::rec
