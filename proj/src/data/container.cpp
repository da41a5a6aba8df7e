#include "wearssl/data/container.hpp"

#include <cstring>
#include <fstream>

#include "wearssl/nn/binary_io.hpp"

namespace wearssl::data {

namespace {
constexpr char kMagic[8] = {'W', 'S', 'S', 'L', 'W', 'I', 'N', '\0'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_windows(const WindowSet& set, const std::filesystem::path& path) {
  const std::size_t C = set.windows.empty() ? set.stats.channels.size() : set.windows.front().channels();
  const std::size_t L = set.windows.empty() ? 0 : set.windows.front().length();
  for (const Window& w : set.windows)
    if (w.values.rank() != 2 || w.channels() != C || w.length() != L)
      throw std::invalid_argument("save_windows: windows must share one (channels, length) shape");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  io::BinaryWriter w(out);
  out.write(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint64_t>(set.windows.size());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(C));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(L));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(set.stats.channels.size()));
  for (std::size_t c = 0; c < set.stats.channels.size(); ++c) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(set.stats.channels[c]));
    w.put<double>(set.stats.mean.at(c));
    w.put<double>(set.stats.stddev.at(c));
  }
  for (const Window& win : set.windows) {
    w.put_string(win.participant_id);
    for (int code : win.labels) w.put<std::int32_t>(code);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(win.split));
  }
  for (const Window& win : set.windows) w.put_raw(win.values.data(), win.values.size());
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

WindowSet load_windows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open window container " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw io::FormatError(path.string() + " is not a window container");
  io::BinaryReader r(in);
  if (const auto v = r.get<std::uint32_t>(); v != kVersion)
    throw io::FormatError("unsupported window container version " + std::to_string(v));
  const auto n = r.get<std::uint64_t>();
  const auto C = r.get<std::uint32_t>();
  const auto L = r.get<std::uint32_t>();
  WindowSet set;
  for (auto k = r.get<std::uint32_t>(); k > 0; --k) {
    const auto ch = r.get<std::uint8_t>();
    if (ch >= kChannelCount) throw io::FormatError("unknown channel code " + std::to_string(ch));
    set.stats.channels.push_back(static_cast<Channel>(ch));
    set.stats.mean.push_back(r.get<double>());
    set.stats.stddev.push_back(r.get<double>());
  }
  set.windows.resize(n);
  for (Window& win : set.windows) {
    win.participant_id = r.get_string();
    for (int& code : win.labels) code = r.get<std::int32_t>();
    const auto split = r.get<std::uint8_t>();
    if (split > 2) throw io::FormatError("unknown split code " + std::to_string(split));
    win.split = static_cast<Split>(split);
  }
  for (Window& win : set.windows) {
    win.values = nn::Tensor({C, L});
    r.get_raw(win.values.data(), win.values.size());
  }
  return set;
}

}  // namespace wearssl::data
