#include "wearssl/augment/augment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wearssl::augment {

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("bad number '" + std::string(s) + "' in " + std::string(context));
  return v;
}

std::size_t parse_count(std::string_view s, std::string_view context) {
  const double v = parse_number(s, context);
  if (v < 0 || v != std::floor(v)) throw std::invalid_argument(std::string(context) + " needs a whole number");
  return static_cast<std::size_t>(v);
}

AugmentationSpec parse_one(std::string_view item) {
  item = trim(item);
  std::string_view name = item;
  std::vector<std::string_view> args;
  if (const auto open = item.find('('); open != std::string_view::npos) {
    if (item.back() != ')') throw std::invalid_argument("unbalanced parenthesis in '" + std::string(item) + "'");
    name = trim(item.substr(0, open));
    std::string_view inner = trim(item.substr(open + 1, item.size() - open - 2));
    while (!inner.empty()) {
      const auto comma = inner.find(',');
      args.push_back(trim(inner.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      inner = inner.substr(comma + 1);
    }
  }
  const auto want = [&](std::size_t max) {
    if (args.size() > max)
      throw std::invalid_argument(std::string(name) + " takes at most " + std::to_string(max) + " arguments");
  };
  if (name == "gaussian_noise") {
    want(1);
    GaussianNoise s;
    if (!args.empty()) s.sigma = parse_number(args[0], name);
    return s;
  }
  if (name == "scale") {
    want(2);
    Scale s;
    if (args.size() >= 1) s.mean = parse_number(args[0], name);
    if (args.size() >= 2) s.sigma = parse_number(args[1], name);
    return s;
  }
  if (name == "negate") return want(0), Negate{};
  if (name == "time_reverse") return want(0), TimeReverse{};
  if (name == "channel_shuffle") return want(0), ChannelShuffle{};
  if (name == "segment_permute") {
    want(1);
    SegmentPermute s;
    if (!args.empty()) s.segments = parse_count(args[0], name);
    return s;
  }
  if (name == "time_warp") {
    want(2);
    TimeWarp s;
    if (args.size() >= 1) s.knots = parse_count(args[0], name);
    if (args.size() >= 2) s.sigma = parse_number(args[1], name);
    return s;
  }
  throw std::invalid_argument("unknown augmentation '" + std::string(name) + "'");
}

}  // namespace

std::string to_string(const AugmentationSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{
                 [&](const GaussianNoise& s) { out << "gaussian_noise(" << s.sigma << ")"; },
                 [&](const Scale& s) { out << "scale(" << s.mean << ", " << s.sigma << ")"; },
                 [&](const Negate&) { out << "negate"; },
                 [&](const TimeReverse&) { out << "time_reverse"; },
                 [&](const ChannelShuffle&) { out << "channel_shuffle"; },
                 [&](const SegmentPermute& s) { out << "segment_permute(" << s.segments << ")"; },
                 [&](const TimeWarp& s) { out << "time_warp(" << s.knots << ", " << s.sigma << ")"; },
             },
             spec);
  return out.str();
}

std::string to_string(const Pipeline& pipeline) {
  std::string out;
  for (const auto& spec : pipeline) {
    if (!out.empty()) out += ", ";
    out += to_string(spec);
  }
  return out;
}

Pipeline parse_pipeline(std::string_view text) {
  Pipeline out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '(') ++depth;
    if (i < text.size() && text[i] == ')') --depth;
    if (depth < 0) throw std::invalid_argument("unbalanced parenthesis in pipeline");
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      const auto item = trim(text.substr(start, i - start));
      if (!item.empty()) out.push_back(parse_one(item));
      else if (i < text.size()) throw std::invalid_argument("empty entry in pipeline");
      start = i + 1;
    }
  }
  if (depth != 0) throw std::invalid_argument("unbalanced parenthesis in pipeline");
  return out;
}

void validate(const AugmentationSpec& spec, std::size_t window_length) {
  std::visit(Overloaded{
                 [](const GaussianNoise& s) {
                   if (!(s.sigma >= 0.0)) throw std::invalid_argument("gaussian_noise sigma must be >= 0");
                 },
                 [](const Scale& s) {
                   if (!(s.sigma >= 0.0)) throw std::invalid_argument("scale sigma must be >= 0");
                   if (!std::isfinite(s.mean)) throw std::invalid_argument("scale mean must be finite");
                 },
                 [&](const SegmentPermute& s) {
                   if (s.segments < 2 || s.segments > window_length)
                     throw std::invalid_argument("segment_permute needs 2 <= segments <= window length (" +
                                                 std::to_string(window_length) + "), got " +
                                                 std::to_string(s.segments));
                 },
                 [](const TimeWarp& s) {
                   if (s.knots < 2) throw std::invalid_argument("time_warp needs at least 2 knots");
                   if (!(s.sigma >= 0.0)) throw std::invalid_argument("time_warp sigma must be >= 0");
                 },
                 [](const auto&) {},
             },
             spec);
}

void validate(const Pipeline& pipeline, std::size_t window_length) {
  for (const auto& spec : pipeline) validate(spec, window_length);
}

Pipeline simclr_pipeline() { return {Negate{}, SegmentPermute{}, TimeReverse{}, ChannelShuffle{}, Scale{}}; }

Pipeline byol_pipeline() { return {GaussianNoise{0.05}, Scale{1.0, 0.1}, Negate{}}; }

nn::Tensor apply_segment_permutation(const nn::Tensor& x, const std::vector<std::size_t>& perm) {
  const std::size_t C = x.dim(0), L = x.dim(1), n = perm.size();
  if (n == 0 || n > L) throw std::invalid_argument("segment count must lie in [1, length]");
  std::vector<std::size_t> begin(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) begin[k + 1] = begin[k] + L / n + (k < L % n ? 1 : 0);
  nn::Tensor out(x.shape());
  for (std::size_t c = 0; c < C; ++c) {
    const double* src = x.data() + c * L;
    double* dst = out.data() + c * L;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t s = perm[k];
      dst = std::copy(src + begin[s], src + begin[s + 1], dst);
    }
  }
  return out;
}

std::vector<double> time_warp_map(std::size_t length, const std::vector<double>& speeds) {
  if (length == 0) return {};
  if (length == 1) return {0.0};
  const std::size_t n = speeds.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) cum[k + 1] = cum[k] + speeds[k];
  const double last = static_cast<double>(length - 1);
  std::vector<double> pos(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double u = static_cast<double>(i) / last * static_cast<double>(n);
    const std::size_t k = std::min(static_cast<std::size_t>(u), n - 1);
    const double frac = u - static_cast<double>(k);
    pos[i] = std::clamp((cum[k] + speeds[k] * frac) / cum[n] * last, 0.0, last);
  }
  pos.front() = 0.0;
  pos.back() = last;
  return pos;
}

nn::Tensor resample(const nn::Tensor& x, const std::vector<double>& positions) {
  const std::size_t C = x.dim(0), L = x.dim(1);
  nn::Tensor out({C, positions.size()});
  for (std::size_t c = 0; c < C; ++c) {
    const double* src = x.data() + c * L;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const double p = positions[i];
      const auto i0 = std::min(static_cast<std::size_t>(p), L - 1);
      const std::size_t i1 = std::min(i0 + 1, L - 1);
      const double f = p - static_cast<double>(i0);
      out[c * positions.size() + i] = src[i0] + (src[i1] - src[i0]) * f;
    }
  }
  return out;
}

nn::Tensor apply(const nn::Tensor& x, const AugmentationSpec& spec, Rng& rng) {
  if (x.rank() != 2) throw std::invalid_argument("augmentations expect a (channels, length) tensor");
  const std::size_t C = x.dim(0), L = x.dim(1);
  return std::visit(
      Overloaded{
          [&](const GaussianNoise& s) {
            nn::Tensor out = x;
            if (s.sigma == 0.0) return out;
            std::normal_distribution<double> z(0.0, s.sigma);
            for (double& v : out.values()) v += z(rng);
            return out;
          },
          [&](const Scale& s) {
            nn::Tensor out = x;
            std::normal_distribution<double> z(s.mean, s.sigma);
            for (std::size_t c = 0; c < C; ++c) {
              const double f = s.sigma == 0.0 ? s.mean : z(rng);
              for (std::size_t t = 0; t < L; ++t) out[c * L + t] *= f;
            }
            return out;
          },
          [&](const Negate&) {
            nn::Tensor out = x;
            for (double& v : out.values()) v = -v;
            return out;
          },
          [&](const TimeReverse&) {
            nn::Tensor out = x;
            for (std::size_t c = 0; c < C; ++c) std::reverse(out.data() + c * L, out.data() + (c + 1) * L);
            return out;
          },
          [&](const ChannelShuffle&) {
            std::vector<std::size_t> perm(C);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            nn::Tensor out(x.shape());
            for (std::size_t c = 0; c < C; ++c)
              std::copy(x.data() + perm[c] * L, x.data() + (perm[c] + 1) * L, out.data() + c * L);
            return out;
          },
          [&](const SegmentPermute& s) {
            std::vector<std::size_t> perm(std::min(s.segments, L));
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            return apply_segment_permutation(x, perm);
          },
          [&](const TimeWarp& s) {
            std::normal_distribution<double> z(1.0, s.sigma);
            std::vector<double> speeds(s.knots);
            // Floor keeps the remap strictly increasing.
            for (double& v : speeds) v = std::max(z(rng), 0.05);
            return resample(x, time_warp_map(L, speeds));
          },
      },
      spec);
}

data::Window augment(const data::Window& window, const Pipeline& pipeline, std::uint64_t seed) {
  Rng rng(seed);
  data::Window out = window;
  for (const auto& spec : pipeline) out.values = apply(out.values, spec, rng);
  return out;
}

std::pair<data::Window, data::Window> make_view_pair(const data::Window& window, const Pipeline& pipeline,
                                                     std::uint64_t seed) {
  return {augment(window, pipeline, derive_seed(seed, {0})), augment(window, pipeline, derive_seed(seed, {1}))};
}

std::size_t steps_per_epoch(std::size_t n, std::size_t batch_size) {
  return n / batch_size + (n % batch_size >= 2 ? 1 : 0);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {0x0de7, epoch}));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

nn::Tensor view_pair_batch(const std::vector<data::Window>& windows, const std::vector<std::size_t>& indices,
                           const Pipeline& pipeline, std::uint64_t seed, std::uint64_t epoch) {
  if (indices.empty()) throw std::invalid_argument("view_pair_batch needs at least one window");
  const nn::Shape sample = windows.at(indices.front()).values.shape();
  const std::size_t B = indices.size(), per = nn::element_count(sample);
  nn::Shape shape{2 * B};
  shape.insert(shape.end(), sample.begin(), sample.end());
  nn::Tensor out(shape);
  for (std::size_t b = 0; b < B; ++b) {
    const data::Window& w = windows.at(indices[b]);
    if (w.values.shape() != sample) throw std::invalid_argument("view_pair_batch: windows differ in shape");
    const auto [v1, v2] = make_view_pair(w, pipeline, derive_seed(seed, {epoch, indices[b]}));
    std::copy(v1.values.data(), v1.values.data() + per, out.data() + b * per);
    std::copy(v2.values.data(), v2.values.data() + per, out.data() + (B + b) * per);
  }
  return out;
}

}  // namespace wearssl::augment
