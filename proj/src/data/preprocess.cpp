#include "wearssl/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wearssl/nn/rng.hpp"

namespace wearssl::data {

void validate(const PreprocessConfig& c) {
  if (c.window_length < 1) throw std::invalid_argument("preprocess.window_length must be >= 1");
  if (c.channels.empty()) throw std::invalid_argument("preprocess.channels must list at least one channel");
  for (std::size_t i = 0; i < c.channels.size(); ++i)
    for (std::size_t j = i + 1; j < c.channels.size(); ++j)
      if (c.channels[i] == c.channels[j]) throw std::invalid_argument("preprocess.channels lists a channel twice");
  const auto frac_ok = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!frac_ok(c.train_fraction) || !frac_ok(c.val_fraction) || !frac_ok(c.test_fraction) ||
      std::abs(c.train_fraction + c.val_fraction + c.test_fraction - 1.0) > 1e-9)
    throw std::invalid_argument("preprocess split fractions must lie in [0,1] and sum to 1");
  if (!(c.std_floor > 0.0)) throw std::invalid_argument("preprocess.std_floor must be > 0");
}

std::size_t interpolate_gaps(std::vector<double>& v, std::size_t max_gap, bool round_to_binary) {
  std::size_t filled = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    if (!std::isnan(v[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < v.size() && std::isnan(v[j])) ++j;
    const std::size_t run = j - i;
    if (i > 0 && j < v.size() && run <= max_gap) {
      const double a = v[i - 1], b = v[j];
      for (std::size_t k = i; k < j; ++k) {
        const double t = static_cast<double>(k - i + 1) / static_cast<double>(run + 1);
        const double x = a + (b - a) * t;
        v[k] = round_to_binary ? (x >= 0.5 ? 1.0 : 0.0) : x;
      }
      filled += run;
    }
    i = j;
  }
  return filled;
}

std::vector<std::pair<std::size_t, std::size_t>> usable_segments(const ParticipantRecord& record,
                                                                 const std::vector<Channel>& channels) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = record.length();
  std::size_t i = 0;
  while (i < n) {
    auto ok = [&](std::size_t k) {
      return std::all_of(channels.begin(), channels.end(),
                         [&](Channel c) { return std::isfinite(record.channel(c)[k]); });
    };
    if (!ok(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && ok(j)) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

std::map<std::string, Split> assign_splits(std::vector<std::string> ids, double val_fraction, double test_fraction,
                                           std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw std::invalid_argument("duplicate participant id in split assignment");
  Rng rng(derive_seed(seed, {0x5e11u}));
  std::shuffle(ids.begin(), ids.end(), rng);
  const double n = static_cast<double>(ids.size());
  const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * n));
  const auto n_test = std::min(ids.size() - std::min(ids.size(), n_val),
                               static_cast<std::size_t>(std::llround(test_fraction * n)));
  const std::size_t n_train = ids.size() - n_val - n_test;
  std::map<std::string, Split> out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    out[ids[i]] = i < n_train ? Split::kTrain : i < n_train + n_val ? Split::kValidation : Split::kTest;
  return out;
}

void assert_no_participant_leakage(const std::vector<Window>& windows) {
  std::map<std::string, Split> seen;
  for (const Window& w : windows) {
    auto [it, inserted] = seen.emplace(w.participant_id, w.split);
    if (!inserted && it->second != w.split)
      throw std::logic_error("participant '" + w.participant_id + "' appears in both the " +
                             std::string(split_name(it->second)) + " and " + std::string(split_name(w.split)) +
                             " splits");
  }
}

PreprocessResult preprocess(const std::vector<ParticipantRecord>& records, const PreprocessConfig& config) {
  validate(config);
  PreprocessResult result;
  const std::size_t L = config.window_length;

  struct Prepared {
    ParticipantRecord record;
    std::vector<std::pair<std::size_t, std::size_t>> segments;
  };
  std::vector<Prepared> kept;
  for (const ParticipantRecord& original : records) {
    Prepared p{original, {}};
    if (config.interpolate) {
      for (Channel c : config.channels)
        result.report.imputed_cells +=
            interpolate_gaps(p.record.channel(c), config.max_gap, c == Channel::kSleepWake);
    }
    p.segments = usable_segments(p.record, config.channels);
    std::size_t windows = 0;
    for (auto [b, e] : p.segments) windows += (e - b) / L;
    if (windows == 0) {
      ++result.report.excluded_participants;
      result.report.warnings.push_back("participant '" + original.participant_id + "' has fewer than " +
                                       std::to_string(L) + " contiguous usable samples and was excluded");
      continue;
    }
    result.report.segments += p.segments.size();
    kept.push_back(std::move(p));
  }

  std::vector<std::string> ids;
  for (const Prepared& p : kept) ids.push_back(p.record.participant_id);
  result.assignment = assign_splits(ids, config.val_fraction, config.test_fraction, config.split_seed);

  const std::size_t C = config.channels.size();
  for (const Prepared& p : kept) {
    const Split split = result.assignment.at(p.record.participant_id);
    for (auto [b, e] : p.segments) {
      for (std::size_t start = b; start + L <= e; start += L) {
        Window w;
        w.values = nn::Tensor({C, L});
        for (std::size_t c = 0; c < C; ++c) {
          const auto& src = p.record.channel(config.channels[c]);
          std::copy(src.begin() + static_cast<std::ptrdiff_t>(start),
                    src.begin() + static_cast<std::ptrdiff_t>(start + L), w.values.data() + c * L);
        }
        w.participant_id = p.record.participant_id;
        w.labels = p.record.labels;
        w.split = split;
        result.windows.push_back(std::move(w));
      }
    }
  }

  NormalizationStats& stats = result.stats;
  stats.channels = config.channels;
  stats.mean.assign(C, 0.0);
  stats.stddev.assign(C, 1.0);
  if (config.normalize) {
    for (std::size_t c = 0; c < C; ++c) {
      if (config.channels[c] == Channel::kSleepWake) continue;
      double sum = 0.0, count = 0.0;
      for (const Window& w : result.windows) {
        if (w.split != Split::kTrain) continue;
        for (std::size_t t = 0; t < L; ++t) sum += w.values[c * L + t];
        count += static_cast<double>(L);
      }
      if (count == 0.0) continue;
      const double mean = sum / count;
      double ss = 0.0;
      for (const Window& w : result.windows) {
        if (w.split != Split::kTrain) continue;
        for (std::size_t t = 0; t < L; ++t) {
          const double d = w.values[c * L + t] - mean;
          ss += d * d;
        }
      }
      stats.mean[c] = mean;
      stats.stddev[c] = std::max(std::sqrt(ss / count), config.std_floor);
    }
    for (Window& w : result.windows)
      for (std::size_t c = 0; c < C; ++c)
        for (std::size_t t = 0; t < L; ++t) {
          double& v = w.values[c * L + t];
          v = (v - stats.mean[c]) / stats.stddev[c];
        }
  }

  assert_no_participant_leakage(result.windows);
  return result;
}

}  // namespace wearssl::data
