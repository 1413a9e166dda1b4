// SPDX-License-Identifier: Apache-2.0
#include "convrec/nnkit/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "convrec/errors.hpp"

namespace convrec::nn {
namespace {

constexpr char kMagic[8] = {'C', 'V', 'R', 'C', 'K', 'P', 'T', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void Checkpoint::add(std::string name, Tensor tensor) {
  for (auto& [n, t] : tensors) {
    if (n == name) {
      t = std::move(tensor);
      return;
    }
  }
  tensors.emplace_back(std::move(name), std::move(tensor));
}

bool Checkpoint::contains(std::string_view name) const noexcept {
  for (const auto& [n, t] : tensors) {
    if (n == name) return true;
  }
  return false;
}

const Tensor& Checkpoint::get(std::string_view name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  throw LookupError("checkpoint has no tensor '" + std::string(name) + "'");
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  nlohmann::json header;
  header["meta"] = checkpoint.meta;
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, t] : checkpoint.tensors) {
    header["tensors"].push_back({{"name", name}, {"shape", t.shape()}});
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, t] : checkpoint.tensors) {
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw ConfigError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ConfigError("not a convrec checkpoint: " + path.string());
  }
  const std::uint64_t len = read_u64(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw ConfigError("truncated checkpoint header: " + path.string());

  const auto header = nlohmann::json::parse(text);
  Checkpoint ckpt;
  ckpt.meta = header.at("meta");
  for (const auto& entry : header.at("tensors")) {
    Tensor t(entry.at("shape").get<Shape>());
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated checkpoint data: " + path.string());
    ckpt.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
  }
  return ckpt;
}

void store_network(Checkpoint& checkpoint, const std::string& prefix, const Network& net) {
  checkpoint.meta[prefix] = {{"input_shape", net.input_shape()}, {"layers", net.specs()}};
  const auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    checkpoint.add(prefix + "/" + std::to_string(i), *params[i]);
  }
}

Network restore_network(const Checkpoint& checkpoint, const std::string& prefix) {
  if (!checkpoint.meta.contains(prefix)) {
    throw LookupError("checkpoint has no network '" + prefix + "'");
  }
  const auto& desc = checkpoint.meta.at(prefix);
  Rng scratch(0);
  Network net(desc.at("input_shape").get<Shape>(),
              desc.at("layers").get<std::vector<LayerSpec>>(), scratch);
  auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& stored = checkpoint.get(prefix + "/" + std::to_string(i));
    if (stored.shape() != params[i]->shape()) {
      throw ConfigError("checkpoint tensor " + prefix + "/" + std::to_string(i) + " has shape " +
                        shape_string(stored.shape()) + ", network expects " +
                        shape_string(params[i]->shape()));
    }
    *params[i] = stored;
  }
  return net;
}

}  // namespace convrec::nn
