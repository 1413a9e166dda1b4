// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "convrec/datasets/interactions.hpp"
#include "convrec/dialogue/engine.hpp"
#include "convrec/simulation/metrics.hpp"
#include "convrec/simulation/user.hpp"

namespace convrec::sim {

struct EpisodeSpec {
  std::size_t id = 0;
  std::optional<UserId> user;
  ItemId target;
};

struct EpisodeResult {
  std::size_t id = 0;
  std::optional<UserId> user;
  ItemId target;
  bool success = false;
  std::size_t turn = 0;  // T; max_turns on failure
  std::vector<dialogue::TurnRecord> log;

  EpisodeOutcome outcome() const { return {success, turn}; }
};

nlohmann::json to_json(const EpisodeResult& result);

/// One conversation with a truthful simulated user. The opening attribute
/// comes from derive_seed(seed, {0}) unless given; the session seed is
/// derive_seed(seed, {1}).
EpisodeResult run_episode(const dialogue::ConversationEngine& engine, const SimulatedUser& user,
                          std::uint64_t seed, std::optional<AttributeId> opening = std::nullopt);

/// One episode per held-out interaction, ids in log order.
std::vector<EpisodeSpec> episodes_from_log(const data::InteractionLog& log,
                                           std::size_t limit = 0);

/// Runs every spec with seed derive_seed(seed, {spec.id}) on `jobs` threads.
/// Results come back sorted by id, so the output does not depend on `jobs`.
std::vector<EpisodeResult> run_episodes(const dialogue::ConversationEngine& engine,
                                        std::span<const EpisodeSpec> specs, std::uint64_t seed,
                                        std::size_t jobs = 1);

MetricsReport evaluate(std::span<const EpisodeResult> results, std::size_t max_turns);

/// One JSON object per line.
void write_transcripts(std::ostream& out, std::span<const EpisodeResult> results);

/// Recomputes every |V_t| of a logged episode from the catalog alone; returns
/// false at the first disagreement.
bool replay_candidates(const data::ItemCatalog& catalog, const EpisodeResult& result);

}  // namespace convrec::sim
