// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "convrec/nnkit/network.hpp"
#include "convrec/nnkit/tensor.hpp"

namespace convrec::nn {

/// Named tensors plus free-form JSON metadata.
///
/// On-disk layout (little-endian):
///   8 bytes   magic "CVRCKPT1"
///   u64       length of the JSON header in bytes
///   bytes     JSON header: {"meta": {...}, "tensors": [{"name", "shape"}...]}
///   f64[]     tensor values, concatenated in header order
/// Values are stored as raw IEEE-754 doubles, so a round trip is bit-exact.
struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Tensor>> tensors;

  void add(std::string name, Tensor tensor);
  bool contains(std::string_view name) const noexcept;
  const Tensor& get(std::string_view name) const;  // throws LookupError
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Stores layer specs under meta[prefix] and parameters as "<prefix>/<i>".
void store_network(Checkpoint& checkpoint, const std::string& prefix, const Network& net);
Network restore_network(const Checkpoint& checkpoint, const std::string& prefix);

}  // namespace convrec::nn
