// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "convrec/datasets/catalog.hpp"
#include "convrec/ids.hpp"

namespace convrec::data {

struct Interaction {
  UserId user;
  ItemId item;
  /// Timestamp (latest-history policy) or play count (most-frequent policy).
  double value = 1.0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

/// Interaction records over a user universe; item ids index an ItemCatalog.
struct InteractionLog {
  std::vector<Interaction> records;
  std::vector<std::string> user_names;

  std::size_t num_users() const noexcept { return user_names.size(); }
  bool empty() const noexcept { return records.empty(); }
  /// Same universe, different records.
  InteractionLog with_records(std::vector<Interaction> subset) const;
};

/// Reads "user-id<TAB>item-id[<TAB>timestamp-or-count]". User tokens receive
/// dense ids in order of first appearance; item tokens must exist in the
/// catalog (LookupError naming the line otherwise).
InteractionLog load_interactions(const std::filesystem::path& path, const ItemCatalog& catalog);

void write_interactions(const InteractionLog& log, const ItemCatalog& catalog,
                        const std::filesystem::path& path);

/// Interaction count per item over the whole log (TopPop popularity).
std::vector<std::size_t> item_popularity(const InteractionLog& log, std::size_t num_items);

}  // namespace convrec::data
