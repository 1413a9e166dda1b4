// SPDX-License-Identifier: Apache-2.0
#include "convrec/service/session_manager.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "convrec/errors.hpp"
#include "convrec/rng.hpp"
#include "convrec/simulation/strategies.hpp"

namespace convrec::service {

using nlohmann::json;

struct SessionManager::Session {
  std::string id;
  std::mutex mutex;
  std::shared_ptr<const dialogue::ConversationEngine> engine;
  dialogue::DialogueState state;
  dialogue::UserContext user;
  std::uint64_t seed = 0;
  std::optional<dialogue::Action> outstanding;
  std::chrono::steady_clock::time_point last_used;
};

namespace {

ServiceError bad_request(const std::string& message) {
  return ServiceError(400, "bad_request", message);
}

std::uint32_t read_id(const json& j, const char* field) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0) ||
      j.get<std::uint64_t>() > UINT32_MAX) {
    throw bad_request(std::string(field) + " must be a non-negative integer id, got " + j.dump());
  }
  return j.get<std::uint32_t>();
}

}  // namespace

SessionManager::SessionManager(std::shared_ptr<const dialogue::ModelBundle> models,
                               SessionManagerOptions options)
    : options_(std::move(options)), id_salt_(std::random_device{}()) {
  options_.policy.validate();
  sim::make_selector(options_.strategy);  // reject unknown names up front
  sim::make_ranker(options_.ranker);
  swap_models(std::move(models));
}

SessionManager::~SessionManager() = default;

void SessionManager::swap_models(std::shared_ptr<const dialogue::ModelBundle> models) {
  std::shared_ptr<const dialogue::ConversationEngine> next;
  if (models) {
    next = std::make_shared<dialogue::ConversationEngine>(
        std::move(models), options_.policy, sim::make_selector(options_.strategy),
        sim::make_ranker(options_.ranker));
  }
  std::unique_lock lock(engine_mutex_);
  engine_ = std::move(next);
}

std::shared_ptr<const dialogue::ConversationEngine> SessionManager::engine() const {
  std::shared_lock lock(engine_mutex_);
  return engine_;
}

std::size_t SessionManager::expire_idle() {
  const auto now = options_.clock();
  std::lock_guard lock(sessions_mutex_);
  return std::erase_if(sessions_, [&](const auto& entry) {
    // A session busy with a request is not idle.
    std::unique_lock session_lock(entry.second->mutex, std::try_to_lock);
    return session_lock.owns_lock() && now - entry.second->last_used > options_.idle_timeout;
  });
}

std::size_t SessionManager::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  expire_idle();
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw ServiceError(404, "session_not_found", "no session '" + id + "'");
  }
  return it->second;
}

json SessionManager::summary(const Session& s) {
  std::vector<std::uint32_t> asked;
  for (std::size_t p = 0; p < s.state.asked.size(); ++p) {
    if (s.state.asked[p]) asked.push_back(static_cast<std::uint32_t>(p));
  }
  json j{{"session_id", s.id},
         {"status", dialogue::to_string(s.state.status)},
         {"turn", s.state.turn},
         {"candidate_count", s.state.candidates.size()},
         {"user", nullptr},
         {"seed", s.seed},
         {"feedback", s.state.feedback},
         {"asked", asked},
         {"outstanding", nullptr}};
  if (s.state.user) j["user"] = s.state.user->value;
  if (s.outstanding) j["outstanding"] = s.outstanding->type == dialogue::ActionType::kQuery
                                            ? "question"
                                            : "recommendation";
  if (!s.state.active()) j["termination_turn"] = s.state.termination_turn;
  return j;
}

json SessionManager::create_session(const json& request) {
  const auto eng = engine();
  if (!eng) throw ServiceError(503, "model_unavailable", "no model is loaded");
  if (!request.is_object()) throw bad_request("request body must be a JSON object");
  if (!request.contains("attribute")) throw bad_request("missing field 'attribute'");
  const auto& models = eng->models();
  const AttributeId opening(read_id(request["attribute"], "attribute"));
  if (opening.index() >= models.catalog.num_attributes()) {
    throw ServiceError(400, "invalid_attribute",
                       "unknown attribute id " + std::to_string(opening.value));
  }
  std::optional<UserId> user;
  if (request.contains("user") && !request["user"].is_null()) {
    user = UserId(read_id(request["user"], "user"));
    if (user->index() >= models.num_users()) {
      throw ServiceError(400, "invalid_user", "unknown user id " + std::to_string(user->value));
    }
  }
  auto session = std::make_shared<Session>();
  session->engine = eng;
  session->state = dialogue::init_session(models.catalog, user, opening);
  session->user = dialogue::make_user_context(models, user);
  session->last_used = options_.clock();
  expire_idle();
  {
    std::lock_guard lock(sessions_mutex_);
    const std::uint64_t n = created_++;
    session->seed = derive_seed(options_.seed, {n});
    char buf[40];
    std::snprintf(buf, sizeof buf, "s%016llx",
                  static_cast<unsigned long long>(mix64(id_salt_ ^ mix64(n))));
    session->id = buf;
    sessions_[session->id] = session;
  }
  return summary(*session);
}

json SessionManager::next_action(const std::string& id) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.clock();
  if (!s->state.active()) {
    throw ServiceError(409, "session_finished",
                       "session is " + std::string(dialogue::to_string(s->state.status)));
  }
  if (!s->outstanding) {
    if (s->state.candidates.empty()) {
      dialogue::exhaust(s->state);
      throw ServiceError(409, "session_finished", "no candidates left; session exhausted");
    }
    s->outstanding = s->engine->next_action(s->state, s->user, s->seed);
  }
  return dialogue::to_json(*s->outstanding, s->engine->models().catalog);
}

json SessionManager::submit_feedback(const std::string& id, const json& payload) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.clock();
  if (!s->state.active()) {
    throw ServiceError(409, "session_finished",
                       "session is " + std::string(dialogue::to_string(s->state.status)));
  }
  if (!s->outstanding) {
    throw ServiceError(409, "no_outstanding_action", "request the next action first");
  }
  if (!payload.is_object()) throw bad_request("feedback must be a JSON object");
  const auto& action = *s->outstanding;
  bool positive = false;
  if (action.type == dialogue::ActionType::kQuery) {
    if (!payload.contains("answer")) {
      throw ServiceError(400, "feedback_mismatch",
                         "a question is outstanding; send {\"answer\": \"yes\" | \"no\"}");
    }
    const auto& a = payload["answer"];
    if (a == "yes" || a == true) {
      positive = true;
    } else if (a == "no" || a == false) {
      positive = false;
    } else {
      throw bad_request("answer must be \"yes\" or \"no\", got " + a.dump());
    }
  } else if (payload.contains("accepted_item")) {
    const ItemId item(read_id(payload["accepted_item"], "accepted_item"));
    if (std::find(action.slate.begin(), action.slate.end(), item) == action.slate.end()) {
      throw bad_request("item " + std::to_string(item.value) + " is not in the recommended slate");
    }
    positive = true;
  } else if (payload.contains("accepted")) {
    if (!payload["accepted"].is_boolean()) throw bad_request("accepted must be true or false");
    positive = payload["accepted"].get<bool>();
  } else {
    throw ServiceError(400, "feedback_mismatch",
                       "a recommendation is outstanding; send {\"accepted\": bool} or "
                       "{\"accepted_item\": id}");
  }
  s->engine->apply(s->state, action, positive);
  s->outstanding.reset();
  return summary(*s);
}

json SessionManager::state(const std::string& id) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.clock();
  return summary(*s);
}

json SessionManager::transcript(const std::string& id) {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->last_used = options_.clock();
  json turns = json::array();
  for (const auto& rec : s->state.log) turns.push_back(dialogue::to_json(rec));
  return {{"session_id", s->id}, {"status", dialogue::to_string(s->state.status)},
          {"turns", std::move(turns)}};
}

json SessionManager::attributes() const {
  const auto eng = engine();
  if (!eng) throw ServiceError(503, "model_unavailable", "no model is loaded");
  const auto& catalog = eng->models().catalog;
  json list = json::array();
  for (std::size_t p = 0; p < catalog.num_attributes(); ++p) {
    const AttributeId a(p);
    list.push_back({{"id", a.value},
                    {"name", catalog.attribute_name(a)},
                    {"item_count", catalog.items_with(a).size()}});
  }
  return {{"attributes", std::move(list)}};
}

json SessionManager::health() const {
  return {{"status", "ok"}, {"model_loaded", engine() != nullptr}, {"sessions", session_count()}};
}

}  // namespace convrec::service
