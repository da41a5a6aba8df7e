#include "wearssl/nn/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "wearssl/nn/binary_io.hpp"

namespace wearssl::nn {

namespace {

constexpr char kMagic[8] = {'W', 'S', 'S', 'L', 'C', 'K', 'P', 'T'};

void put_shape(io::BinaryWriter& w, const Shape& s) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
  for (std::size_t e : s) w.put<std::uint64_t>(e);
}

Shape get_shape(io::BinaryReader& r) {
  const auto rank = r.get<std::uint32_t>();
  if (rank > 8) throw io::FormatError("tensor rank " + std::to_string(rank) + " is implausible");
  Shape s(rank);
  for (auto& e : s) e = r.get<std::uint64_t>();
  return s;
}

void put_tensor(io::BinaryWriter& w, const Tensor& t) {
  put_shape(w, t.shape());
  w.put_raw(t.data(), t.size());
}

void read_into(io::BinaryReader& r, Tensor& t, const std::string& what) {
  const Shape s = get_shape(r);
  if (s != t.shape())
    throw io::FormatError(what + ": stored shape " + to_string(s) + " does not match architecture " +
                          to_string(t.shape()));
  r.get_raw(t.data(), t.size());
}

}  // namespace

const Network& Checkpoint::network(const std::string& name) const {
  auto it = std::find_if(networks.begin(), networks.end(), [&](const auto& n) { return n.first == name; });
  if (it == networks.end()) throw std::out_of_range("checkpoint has no network named '" + name + "'");
  return it->second;
}

Network& Checkpoint::network(const std::string& name) {
  return const_cast<Network&>(std::as_const(*this).network(name));
}

bool Checkpoint::has_network(const std::string& name) const {
  return std::any_of(networks.begin(), networks.end(), [&](const auto& n) { return n.first == name; });
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  io::BinaryWriter w(out);
  out.write(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(Checkpoint::kVersion);
  w.put_string(ckpt.kind);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.attributes.size()));
  for (const auto& [k, v] : ckpt.attributes) {
    w.put_string(k);
    w.put_string(v);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& [k, v] : ckpt.arrays) {
    w.put_string(k);
    w.put_doubles(v);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.networks.size()));
  for (const auto& [name, net] : ckpt.networks) {
    w.put_string(name);
    put_shape(w, net.input_shape());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(net.specs().size()));
    for (const LayerSpec& s : net.specs()) {
      w.put<std::uint8_t>(static_cast<std::uint8_t>(s.kind));
      w.put<std::uint64_t>(s.units);
      w.put<std::uint64_t>(s.kernel);
      w.put<std::uint64_t>(s.stride);
      w.put<double>(s.rate);
    }
    const auto params = net.parameters();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
    for (const Parameter* p : params) put_tensor(w, p->value);
    const auto buffers = net.buffers();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(buffers.size()));
    for (const Tensor* b : buffers) put_tensor(w, *b);
  }
  w.put_string(ckpt.rng_state);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw io::FormatError(path.string() + " is not a checkpoint file");
  io::BinaryReader r(in);
  const auto version = r.get<std::uint32_t>();
  if (version != Checkpoint::kVersion)
    throw io::FormatError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  ckpt.kind = r.get_string();
  for (auto n = r.get<std::uint32_t>(); n > 0; --n) {
    std::string k = r.get_string();
    ckpt.attributes[k] = r.get_string();
  }
  for (auto n = r.get<std::uint32_t>(); n > 0; --n) {
    std::string k = r.get_string();
    ckpt.arrays[k] = r.get_doubles();
  }
  for (auto n = r.get<std::uint32_t>(); n > 0; --n) {
    std::string name = r.get_string();
    Shape input = get_shape(r);
    std::vector<LayerSpec> specs(r.get<std::uint32_t>());
    for (LayerSpec& s : specs) {
      const auto kind = r.get<std::uint8_t>();
      if (kind > static_cast<std::uint8_t>(LayerKind::kGlobalMaxPool))
        throw io::FormatError("unknown layer kind " + std::to_string(kind));
      s.kind = static_cast<LayerKind>(kind);
      s.units = r.get<std::uint64_t>();
      s.kernel = r.get<std::uint64_t>();
      s.stride = r.get<std::uint64_t>();
      s.rate = r.get<double>();
    }
    Rng unused(0);
    Network net(std::move(input), std::move(specs), unused);
    auto params = net.parameters();
    if (r.get<std::uint32_t>() != params.size()) throw io::FormatError("parameter count mismatch in " + name);
    for (Parameter* p : params) read_into(r, p->value, name);
    auto buffers = net.buffers();
    if (r.get<std::uint32_t>() != buffers.size()) throw io::FormatError("buffer count mismatch in " + name);
    for (Tensor* b : buffers) read_into(r, *b, name);
    ckpt.networks.emplace_back(std::move(name), std::move(net));
  }
  ckpt.rng_state = r.get_string();
  return ckpt;
}

}  // namespace wearssl::nn
