#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wearssl/data/types.hpp"
#include "wearssl/nn/rng.hpp"

namespace wearssl::augment {

struct GaussianNoise {
  double sigma = 0.05;
};
/// One factor per channel, drawn from N(mean, sigma).
struct Scale {
  double mean = 1.0;
  double sigma = 0.1;
};
struct Negate {};
struct TimeReverse {};
struct ChannelShuffle {};
struct SegmentPermute {
  std::size_t segments = 4;
};
struct TimeWarp {
  std::size_t knots = 4;
  double sigma = 0.2;
};

using AugmentationSpec =
    std::variant<GaussianNoise, Scale, Negate, TimeReverse, ChannelShuffle, SegmentPermute, TimeWarp>;

/// Applied in order, first to last.
using Pipeline = std::vector<AugmentationSpec>;

std::string to_string(const AugmentationSpec& spec);
std::string to_string(const Pipeline& pipeline);

/// Parses "negate, segment_permute(4), scale(1.0, 0.1)". Parameters may be
/// omitted to take the defaults. Throws std::invalid_argument.
Pipeline parse_pipeline(std::string_view text);

/// Rejects sigma < 0, segments outside [2, window_length], knots < 2.
void validate(const AugmentationSpec& spec, std::size_t window_length);
void validate(const Pipeline& pipeline, std::size_t window_length);

Pipeline simclr_pipeline();  // negate, segment_permute, time_reverse, channel_shuffle, scale
Pipeline byol_pipeline();    // gaussian_noise(0.05), scale(1, 0.1), negate

/// Applies one transform to a (channels, length) tensor.
nn::Tensor apply(const nn::Tensor& x, const AugmentationSpec& spec, Rng& rng);

/// Pure function of its arguments; labels and id are carried through.
data::Window augment(const data::Window& window, const Pipeline& pipeline, std::uint64_t seed);

/// Two independent draws of the pipeline, seeded from derive_seed(seed, {0})
/// and derive_seed(seed, {1}).
std::pair<data::Window, data::Window> make_view_pair(const data::Window& window, const Pipeline& pipeline,
                                                     std::uint64_t seed);

/// Batches per epoch; a trailing batch with fewer than 2 windows is dropped.
std::size_t steps_per_epoch(std::size_t n_windows, std::size_t batch_size);

/// Epoch-local window order: a seeded shuffle of 0..n-1.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

/// View pairs for windows[indices[b]] stacked as (2B, C, L): first views
/// in rows [0, B), their partners in rows [B, 2B). Sample b is seeded with
/// derive_seed(seed, {epoch, indices[b]}).
nn::Tensor view_pair_batch(const std::vector<data::Window>& windows, const std::vector<std::size_t>& indices,
                           const Pipeline& pipeline, std::uint64_t seed, std::uint64_t epoch);

/// Splits time into `perm.size()` near-equal segments (the first
/// length % n segments get one extra sample) and emits segment perm[0],
/// then perm[1], and so on.
nn::Tensor apply_segment_permutation(const nn::Tensor& x, const std::vector<std::size_t>& perm);

/// Monotone piecewise-linear remap of [0, length-1] onto itself. Output time
/// is cut into `speeds.size()` equal pieces; across piece k the source
/// position advances in proportion to speeds[k] (all positive). Returns the
/// source position for every output sample.
std::vector<double> time_warp_map(std::size_t length, const std::vector<double>& speeds);

/// Linear-interpolation resampling of each channel at the given positions.
nn::Tensor resample(const nn::Tensor& x, const std::vector<double>& positions);

}  // namespace wearssl::augment
