// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "convrec/errors.hpp"

namespace convrec::data::detail {

/// Calls `row(fields, line_number)` for every non-blank, non-comment line.
inline void for_each_tsv_row(
    const std::filesystem::path& path,
    const std::function<void(const std::vector<std::string_view>&, std::size_t)>& row) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fields.clear();
    std::string_view rest(line);
    while (true) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    row(fields, line_no);
  }
}

inline std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

template <class T>
T parse_number(std::string_view text, const std::filesystem::path& path, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(where(path, line) + ": cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace convrec::data::detail
