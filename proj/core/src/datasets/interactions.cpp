// SPDX-License-Identifier: Apache-2.0
#include "convrec/datasets/interactions.hpp"

#include <fstream>
#include <iomanip>
#include <unordered_map>

#include "convrec/errors.hpp"
#include "tsv.hpp"

namespace convrec::data {

InteractionLog InteractionLog::with_records(std::vector<Interaction> subset) const {
  InteractionLog out;
  out.user_names = user_names;
  out.records = std::move(subset);
  return out;
}

InteractionLog load_interactions(const std::filesystem::path& path, const ItemCatalog& catalog) {
  InteractionLog log;
  std::unordered_map<std::string, std::uint32_t> users;
  detail::for_each_tsv_row(path, [&](const auto& fields, std::size_t line) {
    if (fields.size() < 2) {
      throw ConfigError(detail::where(path, line) + ": expected user-id<TAB>item-id[<TAB>value]");
    }
    const auto item = catalog.find_item(fields[1]);
    if (!item) {
      throw LookupError(detail::where(path, line) + ": unknown item '" + std::string(fields[1]) +
                        "'");
    }
    auto [it, inserted] =
        users.emplace(std::string(fields[0]), static_cast<std::uint32_t>(log.user_names.size()));
    if (inserted) log.user_names.emplace_back(fields[0]);
    double value = 1.0;
    if (fields.size() >= 3 && !fields[2].empty()) {
      value = detail::parse_number<double>(fields[2], path, line);
    }
    log.records.push_back({UserId(it->second), *item, value});
  });
  return log;
}

void write_interactions(const InteractionLog& log, const ItemCatalog& catalog,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# user-id\titem-id\tvalue\n" << std::setprecision(17);
  for (const Interaction& r : log.records) {
    out << log.user_names.at(r.user.index()) << '\t' << catalog.item_name(r.item) << '\t'
        << r.value << '\n';
  }
}

std::vector<std::size_t> item_popularity(const InteractionLog& log, std::size_t num_items) {
  std::vector<std::size_t> counts(num_items, 0);
  for (const Interaction& r : log.records) {
    if (r.item.index() < num_items) ++counts[r.item.index()];
  }
  return counts;
}

}  // namespace convrec::data
