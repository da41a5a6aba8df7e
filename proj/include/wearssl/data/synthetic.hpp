#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wearssl/data/types.hpp"

namespace wearssl::data {

/// How strongly one disease class perturbs the trace. Each task's classes are
/// mapped to a severity in [0, 1] (binary: 0 / 1; three-class: 0 / 0.5 / 1)
/// and every delta below is multiplied by that severity.
struct ClassEffect {
  double amplitude_drop = 0.0;        // fractional drop of daytime activity amplitude
  double phase_delay_hours = 0.0;     // later sleep onset
  double sleep_loss_hours = 0.0;      // shorter sleep period
  double awakenings_per_hour = 0.0;   // extra nocturnal wake bouts
  double awakening_samples = 2.0;     // mean length of those bouts in samples
  double light_drop = 0.0;            // fractional drop of daytime light exposure
  double activity_noise_gain = 0.0;   // relative increase of daytime activity noise
};

struct SyntheticConfig {
  std::size_t n_participants = 100;
  double days = 7.0;
  std::array<std::vector<double>, kTaskCount> prevalence;  // per task, per class code
  std::array<ClassEffect, kTaskCount> effects;
  double effect_scale = 1.0;  // multiplies every ClassEffect delta; 0 makes labels invisible
  double noise_sigma = 0.25;  // relative Gaussian noise on activity and light
  double trait_spread = 1.0;  // scales participant-to-participant trait variation
  std::uint64_t seed = 0;
  std::int64_t start_time = 1704067200;  // 2024-01-01T00:00:00Z

  /// Reference prevalences and the default effect table.
  static SyntheticConfig defaults();
};

/// Throws std::invalid_argument naming the offending field.
void validate(const SyntheticConfig& config);

/// Participants "P0000", "P0001", ... with labels drawn independently per
/// task from the configured prevalences and traces synthesized from a
/// per-participant seed derived from (config.seed, index).
std::vector<ParticipantRecord> generate_synthetic(const SyntheticConfig& config);

/// Synthesizes one trace for given labels. Pure function of its arguments.
ParticipantRecord synthesize_participant(const std::string& id, const Labels& labels, std::uint64_t seed,
                                         const SyntheticConfig& config);

/// Severity in [0, 1] of a class code.
double severity(Task task, int code);

}  // namespace wearssl::data
