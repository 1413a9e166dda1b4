// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace convrec::dialogue {

inline constexpr double kUnknown = 0.5;

struct PolicyConfig {
  double alpha = 0.1;           // confidence threshold, in [0, 0.5]
  std::size_t slate_size = 10;  // K
  std::size_t max_turns = 15;   // T_max
  std::size_t mc_passes = 10;   // N

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

enum class ActionType { kQuery, kRecommend };

std::string_view to_string(ActionType type);

/// C_p = |q_p - 0.5|.
std::vector<double> confidence(std::span<const double> beliefs);

/// The four predicates of the query rule, evaluated for the coming turn.
struct DecisionInputs {
  bool uncertain_unknown = false;  // some unanswered p has C_p <= alpha
  bool turns_left = false;         // t < T_max
  bool many_candidates = false;    // |V_{t-1}| > K
  bool unknowns_remain = false;    // at least one attribute is unanswered
};

/// Query iff all four predicates hold.
ActionType decide(const DecisionInputs& inputs);

/// Evaluates the predicates for turn `turn` (t >= 2) from beliefs q_{t-1}
/// and feedback a_{t-1}, then applies decide().
DecisionInputs decision_inputs(std::span<const double> beliefs, std::span<const double> feedback,
                               std::size_t turn, std::size_t candidates,
                               const PolicyConfig& config);
ActionType decide_action(std::span<const double> beliefs, std::span<const double> feedback,
                         std::size_t turn, std::size_t candidates, const PolicyConfig& config);

}  // namespace convrec::dialogue
