// SPDX-License-Identifier: Apache-2.0
#include "convrec/simulation/user.hpp"

#include <algorithm>

#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::sim {

SimulatedUser SimulatedUser::for_target(const data::ItemCatalog& catalog,
                                        std::optional<UserId> user, ItemId target) {
  const auto attrs = catalog.attributes_of(target);
  SimulatedUser u{user, target, {attrs.begin(), attrs.end()}};
  std::sort(u.attributes.begin(), u.attributes.end());
  return u;
}

bool SimulatedUser::answer(AttributeId attribute) const {
  return std::binary_search(attributes.begin(), attributes.end(), attribute);
}

bool SimulatedUser::accepts(std::span<const ItemId> slate) const {
  return std::find(slate.begin(), slate.end(), target) != slate.end();
}

AttributeId opening_attribute(const SimulatedUser& user, std::uint64_t seed) {
  if (user.attributes.empty()) {
    throw UsageError("target item " + std::to_string(user.target.value) + " has no attributes");
  }
  Rng rng(seed);
  return user.attributes[uniform_index(rng, user.attributes.size())];
}

}  // namespace convrec::sim
