// SPDX-License-Identifier: Apache-2.0
#include "convrec/dialogue/engine.hpp"

#include <utility>

#include "convrec/dialogue/uncertainty.hpp"
#include "convrec/errors.hpp"
#include "convrec/recommender/ranking.hpp"
#include "convrec/rng.hpp"

namespace convrec::dialogue {

std::vector<ItemId> RnRanker::rank(const ModelBundle& models, const UserContext& user,
                                   std::span<const double> beliefs,
                                   std::span<const ItemId> candidates, std::size_t k) const {
  const auto scores = score_items(models, user, beliefs, candidates);
  return rec::rank_by_score(candidates, scores, k);
}

std::optional<AttributeId> UncertaintySelector::select(const SelectionContext& ctx,
                                                       std::vector<double>* scores) const {
  const auto mc = mc_dropout_variance(ctx.models.btn, ctx.user.embedding,
                                      ctx.user.history_attributes, ctx.state.feedback,
                                      ctx.policy.mc_passes, ctx.seed);
  const auto r = midpoint_proximity(ctx.beliefs);
  auto u = fuse_uncertainty(r, mc.normalized);
  auto choice = select_query_attribute(u, ctx.state.feedback);
  if (scores) *scores = std::move(u);
  return choice;
}

nlohmann::json to_json(const Action& a, const data::ItemCatalog& catalog) {
  nlohmann::json j{{"type", to_string(a.type)}, {"turn", a.turn}, {"beliefs", a.beliefs}};
  if (a.attribute) {
    j["attribute"] = {{"id", a.attribute->value},
                      {"name", catalog.attribute_name(*a.attribute)}};
  }
  if (a.type == ActionType::kRecommend) {
    nlohmann::json items = nlohmann::json::array();
    for (ItemId v : a.slate) items.push_back({{"id", v.value}, {"name", catalog.item_name(v)}});
    j["slate"] = std::move(items);
  }
  if (!a.uncertainty.empty()) j["uncertainty"] = a.uncertainty;
  return j;
}

ConversationEngine::ConversationEngine(std::shared_ptr<const ModelBundle> models,
                                       PolicyConfig policy,
                                       std::shared_ptr<const AttributeSelector> selector,
                                       std::shared_ptr<const Ranker> ranker)
    : models_(std::move(models)),
      policy_(policy),
      selector_(std::move(selector)),
      ranker_(std::move(ranker)) {
  if (!models_ || !selector_ || !ranker_) throw UsageError("engine needs models, selector, ranker");
  policy_.validate();
}

Action ConversationEngine::next_action(const DialogueState& state, const UserContext& user,
                                       std::uint64_t session_seed) const {
  if (!state.active()) {
    throw UsageError("session already " + std::string(to_string(state.status)));
  }
  Action action;
  action.turn = state.turn + 1;
  action.beliefs = current_beliefs(*models_, user, state.feedback);

  bool query = !selector_->never_queries() &&
               decide_action(action.beliefs, state.feedback, action.turn,
                             state.candidates.size(), policy_) == ActionType::kQuery;
  if (query) {
    const SelectionContext ctx{*models_, user,   state,
                               action.beliefs, policy_, *ranker_,
                               derive_seed(session_seed, {action.turn})};
    action.attribute = selector_->select(ctx, &action.uncertainty);
    query = action.attribute.has_value();
  }
  if (query) {
    action.type = ActionType::kQuery;
  } else {
    action.type = ActionType::kRecommend;
    action.slate = ranker_->rank(*models_, user, action.beliefs, state.candidates,
                                 policy_.slate_size);
  }
  return action;
}

void ConversationEngine::apply(DialogueState& state, const Action& action, bool positive) const {
  if (action.turn != state.turn + 1) {
    throw UsageError("action is for turn " + std::to_string(action.turn) + ", session is at turn " +
                     std::to_string(state.turn + 1));
  }
  state.beliefs = action.beliefs;
  if (action.type == ActionType::kQuery) {
    apply_attribute_feedback(state, models_->catalog, *action.attribute, positive);
  } else {
    apply_recommendation_feedback(state, action.slate, positive, policy_);
  }
}

}  // namespace convrec::dialogue
