#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wearssl/nn/network.hpp"

namespace wearssl::nn {

/// On-disk model container shared by every trainer.
///
/// Layout (little-endian, see docs/formats.md):
///   magic "WSSLCKPT" | u32 version
///   string kind
///   u32 n_attributes  { string key, string value }
///   u32 n_arrays      { string key, u64 n, f64[n] }
///   u32 n_networks    { string name, shape input, u32 n_layers
///                       { u8 kind, u64 units, u64 kernel, u64 stride, f64 rate },
///                       u32 n_params  { shape, f64[] },
///                       u32 n_buffers { shape, f64[] } }
///   string rng_state
/// where `shape` is u32 rank followed by rank u64 extents.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string kind;
  std::map<std::string, std::string> attributes;
  std::map<std::string, std::vector<double>> arrays;
  std::vector<std::pair<std::string, Network>> networks;
  std::string rng_state;

  const Network& network(const std::string& name) const;
  Network& network(const std::string& name);
  bool has_network(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wearssl::nn
