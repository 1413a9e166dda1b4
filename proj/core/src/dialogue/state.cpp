// SPDX-License-Identifier: Apache-2.0
#include "convrec/dialogue/state.hpp"

#include <algorithm>
#include <string>

#include "convrec/errors.hpp"

namespace convrec::dialogue {

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::kActive:
      return "active";
    case SessionStatus::kSucceeded:
      return "succeeded";
    case SessionStatus::kExhausted:
      return "exhausted";
  }
  return "unknown";
}

nlohmann::json to_json(const TurnRecord& r) {
  nlohmann::json j{{"turn", r.turn}, {"action", to_string(r.action)}, {"candidates", r.candidates}};
  if (r.turn == 1) j["action"] = "opening";
  if (r.attribute) j["attribute"] = r.attribute->value;
  if (r.action == ActionType::kRecommend) {
    std::vector<std::uint32_t> items;
    for (ItemId v : r.slate) items.push_back(v.value);
    j["slate"] = items;
    j["response"] = r.positive ? "accepted" : "rejected";
  } else {
    j["response"] = r.positive ? "yes" : "no";
  }
  return j;
}

std::size_t DialogueState::unknown_count() const {
  return static_cast<std::size_t>(std::count(feedback.begin(), feedback.end(), kUnknown));
}

DialogueState init_session(const data::ItemCatalog& catalog, std::optional<UserId> user,
                           AttributeId opening) {
  catalog.check_attribute(opening);
  DialogueState s;
  s.user = user;
  s.turn = 1;
  s.feedback.assign(catalog.num_attributes(), kUnknown);
  s.feedback[opening.index()] = 1.0;
  s.asked.assign(catalog.num_attributes(), false);
  s.asked[opening.index()] = true;
  const auto items = catalog.items_with(opening);
  s.candidates.assign(items.begin(), items.end());
  s.log.push_back({1, ActionType::kQuery, opening, {}, true, s.candidates.size()});
  return s;
}

namespace {

void require_active(const DialogueState& s) {
  if (!s.active()) {
    throw UsageError("session already " + std::string(to_string(s.status)));
  }
}

}  // namespace

void apply_attribute_feedback(DialogueState& s, const data::ItemCatalog& catalog,
                              AttributeId attribute, bool yes) {
  require_active(s);
  catalog.check_attribute(attribute);
  if (s.asked[attribute.index()] || s.feedback[attribute.index()] != kUnknown) {
    throw UsageError("attribute " + std::to_string(attribute.value) + " was already answered");
  }
  const auto with = catalog.items_with(attribute);
  std::vector<ItemId> next;
  if (yes) {
    std::set_intersection(s.candidates.begin(), s.candidates.end(), with.begin(), with.end(),
                          std::back_inserter(next));
  } else {
    std::set_difference(s.candidates.begin(), s.candidates.end(), with.begin(), with.end(),
                        std::back_inserter(next));
  }
  s.candidates = std::move(next);
  s.feedback[attribute.index()] = yes ? 1.0 : 0.0;
  s.asked[attribute.index()] = true;
  ++s.turn;
  s.log.push_back({s.turn, ActionType::kQuery, attribute, {}, yes, s.candidates.size()});
}

void apply_recommendation_feedback(DialogueState& s, std::span<const ItemId> slate, bool accepted,
                                   const PolicyConfig& config) {
  require_active(s);
  std::vector<ItemId> sorted(slate.begin(), slate.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
      !std::includes(s.candidates.begin(), s.candidates.end(), sorted.begin(), sorted.end())) {
    throw InvariantError("recommended slate is not a subset of the candidate set");
  }
  ++s.turn;
  if (accepted) {
    if (slate.empty()) throw UsageError("cannot accept an empty slate");
    s.status = SessionStatus::kSucceeded;
    s.termination_turn = s.turn;
  } else {
    std::vector<ItemId> next;
    std::set_difference(s.candidates.begin(), s.candidates.end(), sorted.begin(), sorted.end(),
                        std::back_inserter(next));
    s.candidates = std::move(next);
    s.rejected.insert(s.rejected.end(), slate.begin(), slate.end());
    if (s.turn >= config.max_turns || s.candidates.empty()) {
      s.status = SessionStatus::kExhausted;
      s.termination_turn = config.max_turns;
    }
  }
  s.log.push_back({s.turn, ActionType::kRecommend, std::nullopt,
                   std::vector<ItemId>(slate.begin(), slate.end()), accepted,
                   s.candidates.size()});
}

void exhaust(DialogueState& s) {
  require_active(s);
  s.status = SessionStatus::kExhausted;
  s.termination_turn = s.turn;
}

}  // namespace convrec::dialogue
