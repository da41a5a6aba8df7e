#pragma once

#include <filesystem>
#include <vector>

#include "wearssl/data/preprocess.hpp"

namespace wearssl::data {

/// Windows plus the normalization they were produced with.
struct WindowSet {
  std::vector<Window> windows;
  NormalizationStats stats;
};

/// Flat binary window container, little-endian:
///   magic "WSSLWIN\0" | u32 version | u64 n_windows | u32 channels | u32 length
///   u32 n_stats { u8 channel, f64 mean, f64 std }
///   index: n_windows x { string participant_id, i32 labels[5], u8 split }
///   data:  n_windows x channels x length f64, row-major
/// Strings are u32 length followed by bytes.
void save_windows(const WindowSet& set, const std::filesystem::path& path);
WindowSet load_windows(const std::filesystem::path& path);

}  // namespace wearssl::data
