// SPDX-License-Identifier: Apache-2.0
#include "convrec/simulation/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::sim {

nlohmann::json to_json(const EpisodeResult& r) {
  nlohmann::json log = nlohmann::json::array();
  for (const auto& rec : r.log) log.push_back(dialogue::to_json(rec));
  nlohmann::json j{{"episode", r.id},
                   {"user", nullptr},
                   {"target", r.target.value},
                   {"success", r.success},
                   {"turns", r.turn},
                   {"log", std::move(log)}};
  if (r.user) j["user"] = r.user->value;
  return j;
}

EpisodeResult run_episode(const dialogue::ConversationEngine& engine, const SimulatedUser& user,
                          std::uint64_t seed, std::optional<AttributeId> opening) {
  const auto& models = engine.models();
  const AttributeId p1 = opening ? *opening : opening_attribute(user, derive_seed(seed, {0}));
  const std::uint64_t session_seed = derive_seed(seed, {1});
  const auto context = dialogue::make_user_context(models, user.user);
  auto state = dialogue::init_session(models.catalog, user.user, p1);
  while (state.active()) {
    if (state.candidates.empty()) {
      dialogue::exhaust(state);
      break;
    }
    const auto action = engine.next_action(state, context, session_seed);
    const bool positive = action.type == dialogue::ActionType::kQuery
                              ? user.answer(*action.attribute)
                              : user.accepts(action.slate);
    engine.apply(state, action, positive);
  }
  EpisodeResult r;
  r.user = user.user;
  r.target = user.target;
  r.success = state.status == dialogue::SessionStatus::kSucceeded;
  r.turn = r.success ? state.termination_turn : engine.policy().max_turns;
  r.log = std::move(state.log);
  return r;
}

std::vector<EpisodeSpec> episodes_from_log(const data::InteractionLog& log, std::size_t limit) {
  std::vector<EpisodeSpec> specs;
  for (const auto& rec : log.records) {
    if (limit != 0 && specs.size() == limit) break;
    specs.push_back({specs.size(), rec.user, rec.item});
  }
  return specs;
}

std::vector<EpisodeResult> run_episodes(const dialogue::ConversationEngine& engine,
                                        std::span<const EpisodeSpec> specs, std::uint64_t seed,
                                        std::size_t jobs) {
  std::vector<EpisodeResult> results(specs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        const auto& spec = specs[i];
        const auto user = SimulatedUser::for_target(engine.models().catalog, spec.user,
                                                    spec.target);
        results[i] = run_episode(engine, user, derive_seed(seed, {spec.id}));
        results[i].id = spec.id;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = specs.size();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(specs.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::sort(results.begin(), results.end(),
            [](const EpisodeResult& a, const EpisodeResult& b) { return a.id < b.id; });
  return results;
}

MetricsReport evaluate(std::span<const EpisodeResult> results, std::size_t max_turns) {
  std::vector<EpisodeOutcome> outcomes;
  outcomes.reserve(results.size());
  for (const auto& r : results) outcomes.push_back(r.outcome());
  return evaluate(outcomes, max_turns);
}

void write_transcripts(std::ostream& out, std::span<const EpisodeResult> results) {
  for (const auto& r : results) out << to_json(r).dump() << '\n';
}

bool replay_candidates(const data::ItemCatalog& catalog, const EpisodeResult& result) {
  if (result.log.empty() || !result.log.front().attribute) return false;
  const auto opening = catalog.items_with(*result.log.front().attribute);
  std::vector<ItemId> v(opening.begin(), opening.end());
  if (v.size() != result.log.front().candidates) return false;
  for (std::size_t i = 1; i < result.log.size(); ++i) {
    const auto& rec = result.log[i];
    std::vector<ItemId> next;
    if (rec.action == dialogue::ActionType::kQuery) {
      const auto with = catalog.items_with(*rec.attribute);
      if (rec.positive) {
        std::set_intersection(v.begin(), v.end(), with.begin(), with.end(),
                              std::back_inserter(next));
      } else {
        std::set_difference(v.begin(), v.end(), with.begin(), with.end(),
                            std::back_inserter(next));
      }
    } else if (rec.positive) {
      next = v;
    } else {
      auto slate = rec.slate;
      std::sort(slate.begin(), slate.end());
      std::set_difference(v.begin(), v.end(), slate.begin(), slate.end(),
                          std::back_inserter(next));
    }
    v = std::move(next);
    if (v.size() != rec.candidates || rec.turn != i + 1) return false;
  }
  return true;
}

}  // namespace convrec::sim
