// SPDX-License-Identifier: Apache-2.0
#include "convrec/datasets/catalog.hpp"

#include <algorithm>
#include <fstream>

#include "convrec/errors.hpp"
#include "tsv.hpp"

namespace convrec::data {

ItemCatalog::ItemCatalog(std::vector<std::string> item_names,
                         std::vector<std::vector<AttributeId>> item_attributes,
                         std::size_t num_attributes, std::vector<std::string> attribute_names)
    : item_names_(std::move(item_names)),
      attribute_names_(std::move(attribute_names)),
      item_attributes_(std::move(item_attributes)),
      num_attributes_(num_attributes) {
  if (item_names_.empty()) {
    for (std::size_t v = 0; v < item_attributes_.size(); ++v) {
      item_names_.push_back(std::to_string(v));
    }
  }
  if (item_names_.size() != item_attributes_.size()) {
    throw ConfigError("catalog: " + std::to_string(item_names_.size()) + " item names for " +
                      std::to_string(item_attributes_.size()) + " items");
  }
  if (attribute_names_.empty()) {
    for (std::size_t p = 0; p < num_attributes_; ++p) {
      attribute_names_.push_back("attr" + std::to_string(p));
    }
  }
  if (attribute_names_.size() != num_attributes_) {
    throw ConfigError("catalog: " + std::to_string(attribute_names_.size()) +
                      " attribute names for " + std::to_string(num_attributes_) + " attributes");
  }
  attribute_items_.assign(num_attributes_, {});
  for (std::size_t v = 0; v < item_attributes_.size(); ++v) {
    auto& attrs = item_attributes_[v];
    std::sort(attrs.begin(), attrs.end());
    attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
    if (attrs.empty()) {
      throw ConfigError("catalog: item '" + item_names_[v] + "' has no attributes");
    }
    for (AttributeId p : attrs) {
      if (p.index() >= num_attributes_) {
        throw ConfigError("catalog: item '" + item_names_[v] + "' has attribute " +
                          std::to_string(p.value) + " outside [0, " +
                          std::to_string(num_attributes_) + ")");
      }
      attribute_items_[p.index()].push_back(ItemId(v));
    }
    if (!item_lookup_.emplace(item_names_[v], ItemId(v)).second) {
      throw ConfigError("catalog: duplicate item name '" + item_names_[v] + "'");
    }
  }
}

void ItemCatalog::check_item(ItemId item) const {
  if (item.index() >= item_attributes_.size()) {
    throw LookupError("unknown item id " + std::to_string(item.value));
  }
}

void ItemCatalog::check_attribute(AttributeId attribute) const {
  if (attribute.index() >= num_attributes_) {
    throw LookupError("unknown attribute id " + std::to_string(attribute.value));
  }
}

std::span<const AttributeId> ItemCatalog::attributes_of(ItemId item) const {
  check_item(item);
  return item_attributes_[item.index()];
}

std::span<const ItemId> ItemCatalog::items_with(AttributeId attribute) const {
  check_attribute(attribute);
  return attribute_items_[attribute.index()];
}

bool ItemCatalog::has_attribute(ItemId item, AttributeId attribute) const {
  const auto attrs = attributes_of(item);
  return std::binary_search(attrs.begin(), attrs.end(), attribute);
}

std::vector<double> ItemCatalog::attribute_vector(ItemId item) const {
  std::vector<double> b(num_attributes_, 0.0);
  for (AttributeId p : attributes_of(item)) b[p.index()] = 1.0;
  return b;
}

const std::string& ItemCatalog::item_name(ItemId item) const {
  check_item(item);
  return item_names_[item.index()];
}

const std::string& ItemCatalog::attribute_name(AttributeId attribute) const {
  check_attribute(attribute);
  return attribute_names_[attribute.index()];
}

std::optional<ItemId> ItemCatalog::find_item(std::string_view name) const {
  const auto it = item_lookup_.find(std::string(name));
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

ItemCatalog load_catalog(const std::filesystem::path& path, std::size_t num_attributes,
                         const std::filesystem::path& attribute_names) {
  std::vector<std::string> names;
  std::vector<std::vector<AttributeId>> attrs;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t max_attr = 0;
  bool any = false;
  detail::for_each_tsv_row(path, [&](const auto& fields, std::size_t line) {
    if (fields.size() > 2 || fields[0].empty()) {
      throw ConfigError(detail::where(path, line) + ": expected item-id<TAB>attribute-id");
    }
    const std::string item(fields[0]);
    auto [it, inserted] = index.emplace(item, names.size());
    if (inserted) {
      names.push_back(item);
      attrs.emplace_back();
    }
    any = true;
    // A bare item token declares the item; the catalog rejects it if no
    // attribute row follows.
    if (fields.size() == 1 || fields[1].empty()) return;
    const auto attr = detail::parse_number<std::uint32_t>(fields[1], path, line);
    attrs[it->second].push_back(AttributeId(attr));
    max_attr = std::max<std::size_t>(max_attr, attr);
    any = true;
  });
  if (!any) throw ConfigError(path.string() + ": no item attributes found");
  if (num_attributes == 0) num_attributes = max_attr + 1;
  std::vector<std::string> attr_names;
  if (!attribute_names.empty()) attr_names = load_attribute_names(attribute_names, num_attributes);
  return ItemCatalog(std::move(names), std::move(attrs), num_attributes, std::move(attr_names));
}

void write_catalog(const ItemCatalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# item-id\tattribute-id\n";
  for (std::size_t v = 0; v < catalog.num_items(); ++v) {
    for (AttributeId p : catalog.attributes_of(ItemId(v))) {
      out << catalog.item_name(ItemId(v)) << '\t' << p.value << '\n';
    }
  }
}

std::vector<std::string> load_attribute_names(const std::filesystem::path& path,
                                              std::size_t num_attributes) {
  std::vector<std::string> names(num_attributes);
  for (std::size_t p = 0; p < num_attributes; ++p) names[p] = "attr" + std::to_string(p);
  detail::for_each_tsv_row(path, [&](const auto& fields, std::size_t line) {
    if (fields.size() < 2) {
      throw ConfigError(detail::where(path, line) + ": expected attribute-id<TAB>name");
    }
    const auto id = detail::parse_number<std::size_t>(fields[0], path, line);
    if (id >= num_attributes) {
      throw ConfigError(detail::where(path, line) + ": attribute id " + std::to_string(id) +
                        " outside [0, " + std::to_string(num_attributes) + ")");
    }
    names[id] = std::string(fields[1]);
  });
  return names;
}

}  // namespace convrec::data
