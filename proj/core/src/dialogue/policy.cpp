// SPDX-License-Identifier: Apache-2.0
#include "convrec/dialogue/policy.hpp"

#include <cmath>
#include <string>

#include "convrec/errors.hpp"

namespace convrec::dialogue {

void PolicyConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 0.5)) {
    throw ConfigError("alpha must lie in [0, 0.5], got " + std::to_string(alpha));
  }
  if (slate_size == 0) throw ConfigError("slate_size (K) must be >= 1");
  if (max_turns < 2) throw ConfigError("max_turns (T_max) must be >= 2");
  if (mc_passes == 0) throw ConfigError("mc_passes (N) must be >= 1");
}

std::string_view to_string(ActionType type) {
  return type == ActionType::kQuery ? "question" : "recommendation";
}

std::vector<double> confidence(std::span<const double> beliefs) {
  std::vector<double> c(beliefs.size());
  for (std::size_t p = 0; p < beliefs.size(); ++p) c[p] = std::abs(beliefs[p] - 0.5);
  return c;
}

ActionType decide(const DecisionInputs& in) {
  const bool query = in.uncertain_unknown && in.turns_left && in.many_candidates &&
                     in.unknowns_remain;
  return query ? ActionType::kQuery : ActionType::kRecommend;
}

DecisionInputs decision_inputs(std::span<const double> beliefs, std::span<const double> feedback,
                               std::size_t turn, std::size_t candidates,
                               const PolicyConfig& config) {
  if (beliefs.size() != feedback.size()) {
    throw ConfigError("belief and feedback vectors differ in length");
  }
  DecisionInputs in;
  for (std::size_t p = 0; p < beliefs.size(); ++p) {
    if (feedback[p] != kUnknown) continue;
    in.unknowns_remain = true;
    if (std::abs(beliefs[p] - 0.5) <= config.alpha) in.uncertain_unknown = true;
  }
  in.turns_left = turn < config.max_turns;
  in.many_candidates = candidates > config.slate_size;
  return in;
}

ActionType decide_action(std::span<const double> beliefs, std::span<const double> feedback,
                         std::size_t turn, std::size_t candidates, const PolicyConfig& config) {
  return decide(decision_inputs(beliefs, feedback, turn, candidates, config));
}

}  // namespace convrec::dialogue
