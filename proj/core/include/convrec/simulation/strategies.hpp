// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convrec/dialogue/engine.hpp"

namespace convrec::sim {

/// -Pr ln Pr - (1 - Pr) ln(1 - Pr) with 0 ln 0 = 0.
double binary_entropy(double pr);

/// Attribute whose split of the candidates has the highest entropy, with
/// Pr(p) = |V n V[p]| / |V|. Only attributes with unknown feedback are
/// eligible; ties go to the lower id. nullopt when none is left or V is empty.
std::optional<AttributeId> max_entropy_attribute(std::span<const ItemId> candidates,
                                                 const data::ItemCatalog& catalog,
                                                 std::span<const double> feedback,
                                                 std::vector<double>* entropies = nullptr);

/// Uniform over unanswered attributes, drawn from the turn seed.
class RandomSelector final : public dialogue::AttributeSelector {
 public:
  std::string_view name() const noexcept override { return "random"; }
  std::optional<AttributeId> select(const dialogue::SelectionContext& context,
                                    std::vector<double>* scores) const override;
};

/// For each unanswered p, ranks V with a_p = 0 and with a_p = 1 and keeps the
/// p whose two slates (as sets) share the fewest items.
class MostInformativeSelector final : public dialogue::AttributeSelector {
 public:
  std::string_view name() const noexcept override { return "most-inf"; }
  std::optional<AttributeId> select(const dialogue::SelectionContext& context,
                                    std::vector<double>* scores) const override;
};

class MaxEntropySelector final : public dialogue::AttributeSelector {
 public:
  std::string_view name() const noexcept override { return "max-entropy"; }
  std::optional<AttributeId> select(const dialogue::SelectionContext& context,
                                    std::vector<double>* scores) const override;
};

/// argmax of the current beliefs over unanswered attributes.
class HighestScoreSelector final : public dialogue::AttributeSelector {
 public:
  std::string_view name() const noexcept override { return "highest-score"; }
  std::optional<AttributeId> select(const dialogue::SelectionContext& context,
                                    std::vector<double>* scores) const override;
};

/// Recommends at every system turn.
class GreedySelector final : public dialogue::AttributeSelector {
 public:
  std::string_view name() const noexcept override { return "greedy"; }
  std::optional<AttributeId> select(const dialogue::SelectionContext&,
                                    std::vector<double>*) const override {
    return std::nullopt;
  }
  bool never_queries() const noexcept override { return true; }
};

/// Global interaction counts, most popular first, ties by item id.
class TopPopRanker final : public dialogue::Ranker {
 public:
  std::string_view name() const noexcept override { return "toppop"; }
  std::vector<ItemId> rank(const dialogue::ModelBundle& models, const dialogue::UserContext& user,
                           std::span<const double> beliefs, std::span<const ItemId> candidates,
                           std::size_t k) const override;
};

/// minicorn | random | most-inf | max-entropy | highest-score | greedy.
/// Throws ConfigError listing the valid names.
std::shared_ptr<const dialogue::AttributeSelector> make_selector(std::string_view name);
/// rn | toppop.
std::shared_ptr<const dialogue::Ranker> make_ranker(std::string_view name);

const std::vector<std::string>& strategy_names();
/// minicorn and the four alternative attribute selectors.
const std::vector<std::string>& ablation_strategies();

}  // namespace convrec::sim
