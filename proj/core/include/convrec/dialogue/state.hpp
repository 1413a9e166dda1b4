// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "convrec/datasets/catalog.hpp"
#include "convrec/dialogue/policy.hpp"
#include "convrec/ids.hpp"

namespace convrec::dialogue {

enum class SessionStatus { kActive, kSucceeded, kExhausted };
std::string_view to_string(SessionStatus status);

/// One completed turn.
struct TurnRecord {
  std::size_t turn = 0;
  ActionType action = ActionType::kQuery;
  std::optional<AttributeId> attribute;  // query (and the opening turn)
  std::vector<ItemId> slate;             // recommendation
  bool positive = false;                 // yes / accepted
  std::size_t candidates = 0;            // |V_t| after the turn
};

nlohmann::json to_json(const TurnRecord& record);

/// Per-session dialogue state. `turn` is the last completed turn; the opening
/// turn (the user's attribute) is turn 1, the system acts from turn 2.
struct DialogueState {
  std::optional<UserId> user;  // nullopt for a cold-start user
  std::size_t turn = 0;
  std::vector<double> feedback;    // a_t in {0, 0.5, 1}^P
  std::vector<ItemId> candidates;  // V_t, sorted ascending
  std::vector<double> beliefs;     // q used for the most recent system action
  std::vector<bool> asked;
  std::vector<ItemId> rejected;
  std::vector<TurnRecord> log;
  SessionStatus status = SessionStatus::kActive;
  std::size_t termination_turn = 0;

  std::size_t unknown_count() const;
  bool active() const noexcept { return status == SessionStatus::kActive; }
};

/// t = 1, a_{p1} = 1, V_1 = V[p1], asked = {p1}. Throws LookupError for an
/// unknown attribute.
DialogueState init_session(const data::ItemCatalog& catalog, std::optional<UserId> user,
                           AttributeId opening);

/// Yes: a_p = 1, V <- V n V[p]. No: a_p = 0, V <- V \ V[p]. Advances the turn.
/// Throws UsageError if p was already answered or the session is over.
void apply_attribute_feedback(DialogueState& state, const data::ItemCatalog& catalog,
                              AttributeId attribute, bool yes);

/// Accepted: the session succeeds at this turn. Rejected: the slate leaves
/// V; at turn T_max (or with no candidates left) the session is exhausted.
/// Throws InvariantError if the slate is not a subset of V.
void apply_recommendation_feedback(DialogueState& state, std::span<const ItemId> slate,
                                   bool accepted, const PolicyConfig& config);

/// Ends the session without a further turn (no candidates to recommend).
void exhaust(DialogueState& state);

}  // namespace convrec::dialogue
