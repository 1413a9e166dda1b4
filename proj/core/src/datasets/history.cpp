// SPDX-License-Identifier: Apache-2.0
#include "convrec/datasets/history.hpp"

#include <algorithm>
#include <map>

#include "convrec/errors.hpp"

namespace convrec::data {

HistoryPolicy history_policy_from_string(std::string_view name) {
  if (name == "latest") return HistoryPolicy::kLatest;
  if (name == "most-frequent") return HistoryPolicy::kMostFrequent;
  throw ConfigError("unknown history policy '" + std::string(name) +
                    "' (expected latest or most-frequent)");
}

std::string_view to_string(HistoryPolicy policy) {
  return policy == HistoryPolicy::kLatest ? "latest" : "most-frequent";
}

namespace {

std::vector<ItemId> rank_items(const std::map<ItemId, double>& scores, std::size_t k) {
  std::vector<std::pair<ItemId, double>> ranked(scores.begin(), scores.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<ItemId> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

void accumulate(std::map<ItemId, double>& scores, const Interaction& r, HistoryPolicy policy) {
  auto [it, inserted] = scores.emplace(r.item, r.value);
  if (inserted) return;
  if (policy == HistoryPolicy::kLatest) {
    it->second = std::max(it->second, r.value);
  } else {
    it->second += r.value;
  }
}

}  // namespace

UserHistory select_history(UserId user, const InteractionLog& log, std::size_t k,
                           HistoryPolicy policy) {
  // std::map iterates items in ascending id order; the stable sort keeps that
  // order among equal scores.
  std::map<ItemId, double> scores;
  for (const Interaction& r : log.records) {
    if (r.user == user) accumulate(scores, r, policy);
  }
  return {user, rank_items(scores, k)};
}

std::vector<UserHistory> select_histories(const InteractionLog& log, std::size_t k,
                                          HistoryPolicy policy) {
  std::vector<std::map<ItemId, double>> scores(log.num_users());
  for (const Interaction& r : log.records) accumulate(scores.at(r.user.index()), r, policy);
  std::vector<UserHistory> out;
  out.reserve(scores.size());
  for (std::size_t u = 0; u < scores.size(); ++u) out.push_back({UserId(u), rank_items(scores[u], k)});
  return out;
}

nn::Tensor history_attribute_matrix(const ItemCatalog& catalog, const UserHistory& history,
                                    std::size_t rows, const ItemId* exclude) {
  const std::size_t p = catalog.num_attributes();
  nn::Tensor b({rows, p});
  for (std::size_t r = 0; r < history.items.size() && r < rows; ++r) {
    if (exclude && history.items[r] == *exclude) continue;
    for (AttributeId a : catalog.attributes_of(history.items[r])) b[r * p + a.index()] = 1.0;
  }
  return b;
}

}  // namespace convrec::data
