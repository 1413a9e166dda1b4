// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "convrec/datasets/catalog.hpp"
#include "convrec/datasets/interactions.hpp"
#include "convrec/ids.hpp"
#include "convrec/nnkit/tensor.hpp"

namespace convrec::data {

enum class HistoryPolicy { kLatest, kMostFrequent };

HistoryPolicy history_policy_from_string(std::string_view name);
std::string_view to_string(HistoryPolicy policy);

inline constexpr std::size_t kDefaultHistoryLength = 5;

/// Representative items for a user, most representative first.
struct UserHistory {
  UserId user;
  std::vector<ItemId> items;
};

/// Per item, aggregates the user's records (latest: max value; most-frequent:
/// sum of values), sorts descending with ties by ascending item id, and keeps
/// the first k. A user without records gets an empty history.
UserHistory select_history(UserId user, const InteractionLog& log, std::size_t k,
                           HistoryPolicy policy);

/// select_history for every user of the log in one pass.
std::vector<UserHistory> select_histories(const InteractionLog& log, std::size_t k,
                                          HistoryPolicy policy);

/// B_u as a [rows, P] tensor; rows beyond the history are zero. Items equal to
/// `exclude` (if given) are written as zero rows.
nn::Tensor history_attribute_matrix(const ItemCatalog& catalog, const UserHistory& history,
                                    std::size_t rows, const ItemId* exclude = nullptr);

}  // namespace convrec::data
