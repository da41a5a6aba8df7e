#include "wearssl/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wearssl/nn/rng.hpp"

namespace wearssl::data {

SyntheticConfig SyntheticConfig::defaults() {
  SyntheticConfig c;
  for (Task t : kAllTasks) c.prevalence[static_cast<std::size_t>(t)] = reference_prevalence(t);
  auto& e = c.effects;
  // Fragmented sleep: many short nocturnal arousals.
  e[static_cast<std::size_t>(Task::kSleepApnea)] = {.awakenings_per_hour = 6.0, .awakening_samples = 2.0};
  // Lower daytime activity.
  e[static_cast<std::size_t>(Task::kDiabetes)] = {.amplitude_drop = 0.4};
  // Late, short sleep with long wake bouts.
  e[static_cast<std::size_t>(Task::kInsomnia)] = {.phase_delay_hours = 2.0,
                                                  .sleep_loss_hours = 1.5,
                                                  .awakenings_per_hour = 1.0,
                                                  .awakening_samples = 12.0};
  // Erratic daytime activity.
  e[static_cast<std::size_t>(Task::kHypertension)] = {.amplitude_drop = 0.1, .activity_noise_gain = 1.5};
  // Less time in daylight.
  e[static_cast<std::size_t>(Task::kMetabolicSyndrome)] = {.amplitude_drop = 0.15, .light_drop = 0.6};
  return c;
}

void validate(const SyntheticConfig& c) {
  if (c.n_participants == 0) throw std::invalid_argument("synthetic.n_participants must be >= 1");
  if (!(c.days > 0.0)) throw std::invalid_argument("synthetic.days must be > 0");
  if (!(c.noise_sigma >= 0.0)) throw std::invalid_argument("synthetic.noise_sigma must be >= 0");
  if (!(c.effect_scale >= 0.0)) throw std::invalid_argument("synthetic.effect_scale must be >= 0");
  if (!(c.trait_spread >= 0.0)) throw std::invalid_argument("synthetic.trait_spread must be >= 0");
  for (Task t : kAllTasks) {
    const auto& p = c.prevalence[static_cast<std::size_t>(t)];
    const std::string name = "synthetic.prevalence." + std::string(task_name(t));
    if (p.size() != class_count(t))
      throw std::invalid_argument(name + " needs " + std::to_string(class_count(t)) + " entries");
    for (double v : p)
      if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(name + " entries must lie in (0, 1)");
    if (std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) > 1e-6)
      throw std::invalid_argument(name + " must sum to 1");
  }
}

double severity(Task task, int code) {
  return class_count(task) == 3 ? 0.5 * static_cast<double>(code) : static_cast<double>(code);
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSamplesPerHour = 3600.0 / static_cast<double>(kSamplePeriodSeconds);

struct Traits {
  double onset_hours;       // habitual sleep onset, hours after midnight
  double duration_hours;
  double amplitude;         // daytime activity counts per epoch
  double light_peak;        // lux
  double awakenings_per_hour;
  double awakening_samples;
  double noise_gain;
};

Traits draw_traits(const Labels& labels, const SyntheticConfig& c, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Traits tr{};
  tr.onset_hours = 23.0 + 0.75 * c.trait_spread * z(rng);
  tr.duration_hours = 7.5 + 0.5 * c.trait_spread * z(rng);
  tr.amplitude = 250.0 * std::exp(0.3 * c.trait_spread * z(rng));
  tr.light_peak = 600.0 * std::exp(0.4 * c.trait_spread * z(rng));
  tr.awakenings_per_hour = 0.3;
  tr.noise_gain = 0.0;
  double bout_weight = 0.0, bout_samples = 0.0;
  for (Task t : kAllTasks) {
    const ClassEffect& e = c.effects[static_cast<std::size_t>(t)];
    const double s = severity(t, label_of(labels, t)) * c.effect_scale;
    tr.amplitude *= std::max(0.05, 1.0 - e.amplitude_drop * s);
    tr.light_peak *= std::max(0.05, 1.0 - e.light_drop * s);
    tr.onset_hours += e.phase_delay_hours * s;
    tr.duration_hours -= e.sleep_loss_hours * s;
    tr.awakenings_per_hour += e.awakenings_per_hour * s;
    tr.noise_gain += e.activity_noise_gain * s;
    bout_weight += e.awakenings_per_hour * s;
    bout_samples += e.awakenings_per_hour * s * e.awakening_samples;
  }
  tr.duration_hours = std::max(tr.duration_hours, 2.0);
  // Baseline bouts are 2 samples; disease bouts mix in by rate.
  tr.awakening_samples = (0.3 * 2.0 + bout_samples) / (0.3 + bout_weight);
  return tr;
}

}  // namespace

ParticipantRecord synthesize_participant(const std::string& id, const Labels& labels, std::uint64_t seed,
                                         const SyntheticConfig& c) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Traits tr = draw_traits(labels, c, rng);

  // Recording starts at a random 30 s slot within the first day.
  const auto offset_slots = static_cast<std::int64_t>(u(rng) * static_cast<double>(kSamplesPerDay));
  const auto n = static_cast<std::size_t>(std::llround(c.days * static_cast<double>(kSamplesPerDay)));
  ParticipantRecord rec;
  rec.participant_id = id;
  rec.labels = labels;
  rec.start_time = c.start_time + offset_slots * kSamplePeriodSeconds;
  for (auto& ch : rec.channels) ch.assign(n, 0.0);

  // Nightly sleep intervals in hours since the midnight before the start,
  // with night-to-night jitter.
  const int nights = static_cast<int>(std::ceil(c.days)) + 2;
  std::vector<std::pair<double, double>> sleeps;
  for (int d = -1; d < nights; ++d) {
    const double onset = 24.0 * d + tr.onset_hours + 0.3 * c.trait_spread * z(rng);
    const double dur = std::max(1.0, tr.duration_hours + 0.3 * c.trait_spread * z(rng));
    sleeps.emplace_back(onset, onset + dur);
  }
  const double acrophase = tr.onset_hours + tr.duration_hours / 2.0 + 12.0;

  auto& activity = rec.channel(Channel::kActivity);
  auto& light = rec.channel(Channel::kLight);
  auto& sleep_wake = rec.channel(Channel::kSleepWake);
  const double bout_prob = tr.awakenings_per_hour / kSamplesPerHour;
  std::poisson_distribution<int> extra_bout(std::max(tr.awakening_samples - 1.0, 0.0));
  std::size_t bout_left = 0;
  std::size_t night = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double hours = static_cast<double>(offset_slots + static_cast<std::int64_t>(i)) / kSamplesPerHour;
    while (night + 1 < sleeps.size() && hours >= sleeps[night].second) ++night;
    const bool in_sleep_period = hours >= sleeps[night].first && hours < sleeps[night].second;
    const double circadian = std::max(0.0, std::cos(kTwoPi * (hours - acrophase) / 24.0));

    if (in_sleep_period && bout_left == 0 && u(rng) < bout_prob)
      bout_left = 1 + static_cast<std::size_t>(extra_bout(rng));
    if (!in_sleep_period) bout_left = 0;

    if (in_sleep_period && bout_left == 0) {
      activity[i] = tr.amplitude * 0.02 * std::abs(z(rng));
      light[i] = 0.0;
      sleep_wake[i] = 0.0;
    } else if (in_sleep_period) {
      activity[i] = tr.amplitude * (0.3 + 0.3 * std::abs(z(rng)));
      light[i] = 5.0 * u(rng);
      sleep_wake[i] = 1.0;
      --bout_left;
    } else {
      const double level = tr.amplitude * (0.35 + 0.65 * circadian);
      const double noise = c.noise_sigma * (1.0 + tr.noise_gain);
      activity[i] = std::max(0.0, level * (1.0 + noise * z(rng)));
      light[i] = std::max(0.0, tr.light_peak * (0.05 + circadian) * (1.0 + c.noise_sigma * z(rng)));
      sleep_wake[i] = 1.0;
    }
  }
  return rec;
}

std::vector<ParticipantRecord> generate_synthetic(const SyntheticConfig& c) {
  validate(c);
  std::vector<ParticipantRecord> out;
  out.reserve(c.n_participants);
  for (std::size_t p = 0; p < c.n_participants; ++p) {
    Rng label_rng(derive_seed(c.seed, {p, 0x1abe1u}));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Labels labels{};
    for (Task t : kAllTasks) {
      const auto& prev = c.prevalence[static_cast<std::size_t>(t)];
      const double draw = u(label_rng);
      double acc = 0.0;
      int code = static_cast<int>(prev.size()) - 1;
      for (std::size_t k = 0; k < prev.size(); ++k) {
        acc += prev[k];
        if (draw < acc) {
          code = static_cast<int>(k);
          break;
        }
      }
      labels[static_cast<std::size_t>(t)] = code;
    }
    char id[16];
    std::snprintf(id, sizeof id, "P%04zu", p);
    out.push_back(synthesize_participant(id, labels, derive_seed(c.seed, {p, 0x7ace5u}), c));
  }
  return out;
}

}  // namespace wearssl::data
