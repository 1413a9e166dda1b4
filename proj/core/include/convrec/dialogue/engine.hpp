// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "convrec/dialogue/models.hpp"
#include "convrec/dialogue/policy.hpp"
#include "convrec/dialogue/state.hpp"

namespace convrec::dialogue {

/// Orders candidates for a recommendation slate.
class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::string_view name() const noexcept = 0;
  /// min(k, |candidates|) items, best first.
  virtual std::vector<ItemId> rank(const ModelBundle& models, const UserContext& user,
                                   std::span<const double> beliefs,
                                   std::span<const ItemId> candidates, std::size_t k) const = 0;
};

/// Recommendation-net ranking: lowest scores first, ties by item id.
class RnRanker final : public Ranker {
 public:
  std::string_view name() const noexcept override { return "rn"; }
  std::vector<ItemId> rank(const ModelBundle& models, const UserContext& user,
                           std::span<const double> beliefs, std::span<const ItemId> candidates,
                           std::size_t k) const override;
};

struct SelectionContext {
  const ModelBundle& models;
  const UserContext& user;
  const DialogueState& state;
  std::span<const double> beliefs;  // q_{t-1}
  const PolicyConfig& policy;
  const Ranker& ranker;
  std::uint64_t seed;  // derived from (session seed, turn)
};

/// Chooses which unanswered attribute to ask about.
class AttributeSelector {
 public:
  virtual ~AttributeSelector() = default;
  virtual std::string_view name() const noexcept = 0;
  /// nullopt when nothing is left to ask. `scores` (optional) receives the
  /// per-attribute values the choice maximised, for transcripts.
  virtual std::optional<AttributeId> select(const SelectionContext& context,
                                            std::vector<double>* scores) const = 0;
  /// Strategies that never ask (greedy) bypass the query rule.
  virtual bool never_queries() const noexcept { return false; }
};

/// Fused MC-dropout variance and midpoint proximity.
class UncertaintySelector final : public AttributeSelector {
 public:
  std::string_view name() const noexcept override { return "minicorn"; }
  std::optional<AttributeId> select(const SelectionContext& context,
                                    std::vector<double>* scores) const override;
};

struct Action {
  ActionType type = ActionType::kQuery;
  std::size_t turn = 0;
  std::optional<AttributeId> attribute;
  std::vector<ItemId> slate;
  std::vector<double> beliefs;      // q_{t-1}
  std::vector<double> uncertainty;  // selector scores, when available
};

nlohmann::json to_json(const Action& action, const data::ItemCatalog& catalog);

/// Stateless driver of the query/recommend loop over a frozen model bundle.
class ConversationEngine {
 public:
  ConversationEngine(std::shared_ptr<const ModelBundle> models, PolicyConfig policy,
                     std::shared_ptr<const AttributeSelector> selector,
                     std::shared_ptr<const Ranker> ranker);

  const ModelBundle& models() const noexcept { return *models_; }
  std::shared_ptr<const ModelBundle> model_snapshot() const noexcept { return models_; }
  const PolicyConfig& policy() const noexcept { return policy_; }
  const AttributeSelector& selector() const noexcept { return *selector_; }
  const Ranker& ranker() const noexcept { return *ranker_; }

  /// The system's action for turn state.turn + 1. A pure function of
  /// (state, user, session seed). Throws UsageError on a finished session.
  Action next_action(const DialogueState& state, const UserContext& user,
                     std::uint64_t session_seed) const;

  /// Applies the user's response (yes / accepted when `positive`).
  void apply(DialogueState& state, const Action& action, bool positive) const;

 private:
  std::shared_ptr<const ModelBundle> models_;
  PolicyConfig policy_;
  std::shared_ptr<const AttributeSelector> selector_;
  std::shared_ptr<const Ranker> ranker_;
};

}  // namespace convrec::dialogue
