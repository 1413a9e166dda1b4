// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "convrec/datasets/catalog.hpp"
#include "convrec/ids.hpp"

namespace convrec::sim {

/// A truthful user looking for one target item. Answers depend only on the
/// target's attribute set.
struct SimulatedUser {
  std::optional<UserId> user;
  ItemId target;
  std::vector<AttributeId> attributes;  // P_v, sorted

  static SimulatedUser for_target(const data::ItemCatalog& catalog, std::optional<UserId> user,
                                  ItemId target);
  bool answer(AttributeId attribute) const;
  bool accepts(std::span<const ItemId> slate) const;
};

/// Uniform over P_v, a pure function of the seed. Throws UsageError when the
/// target has no attributes.
AttributeId opening_attribute(const SimulatedUser& user, std::uint64_t seed);

}  // namespace convrec::sim
