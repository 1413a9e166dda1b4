// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "convrec/ids.hpp"

namespace convrec::data {

/// Items, their attribute sets and the inverted attribute index.
///
/// Invariants (checked at construction):
///   * every item has at least one attribute;
///   * item v is listed in items_with(p) iff p is in attributes_of(v);
///   * both lists are sorted ascending and duplicate free.
class ItemCatalog {
 public:
  ItemCatalog() = default;

  /// `item_attributes[v]` lists the attributes of dense item v (duplicates are
  /// removed). Throws ConfigError for an item with no attribute or an attribute
  /// id >= num_attributes.
  ItemCatalog(std::vector<std::string> item_names,
              std::vector<std::vector<AttributeId>> item_attributes, std::size_t num_attributes,
              std::vector<std::string> attribute_names = {});

  std::size_t num_items() const noexcept { return item_attributes_.size(); }
  std::size_t num_attributes() const noexcept { return num_attributes_; }

  std::span<const AttributeId> attributes_of(ItemId item) const;
  std::span<const ItemId> items_with(AttributeId attribute) const;
  bool has_attribute(ItemId item, AttributeId attribute) const;
  /// b(v) as 0/1 doubles.
  std::vector<double> attribute_vector(ItemId item) const;

  const std::string& item_name(ItemId item) const;
  const std::string& attribute_name(AttributeId attribute) const;
  std::optional<ItemId> find_item(std::string_view name) const;

  void check_item(ItemId item) const;            // throws LookupError
  void check_attribute(AttributeId attribute) const;  // throws LookupError

 private:
  std::vector<std::string> item_names_;
  std::vector<std::string> attribute_names_;
  std::vector<std::vector<AttributeId>> item_attributes_;
  std::vector<std::vector<ItemId>> attribute_items_;
  std::unordered_map<std::string, ItemId> item_lookup_;
  std::size_t num_attributes_ = 0;
};

/// Reads "item-id<TAB>attribute-id" rows. Item tokens are opaque strings given
/// dense ids in order of first appearance; attribute ids must be integers in
/// [0, P). '#' lines and blank lines are skipped; repeated rows are merged.
/// If `num_attributes` is 0 it is inferred as max id + 1.
ItemCatalog load_catalog(const std::filesystem::path& path, std::size_t num_attributes = 0,
                         const std::filesystem::path& attribute_names = {});

/// Writes the catalog in the load_catalog format (one row per item/attribute).
void write_catalog(const ItemCatalog& catalog, const std::filesystem::path& path);

/// Reads "attribute-id<TAB>name" rows.
std::vector<std::string> load_attribute_names(const std::filesystem::path& path,
                                              std::size_t num_attributes);

}  // namespace convrec::data
