#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wearssl/data/types.hpp"

namespace wearssl::data {

struct PreprocessConfig {
  std::size_t window_length = 512;
  std::size_t max_gap = 10;  // longest run of missing samples that is interpolated
  bool interpolate = true;
  bool normalize = true;
  std::vector<Channel> channels = {Channel::kActivity, Channel::kLight, Channel::kSleepWake};
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t split_seed = 0;
  double std_floor = 1e-8;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const PreprocessConfig& config);

/// Per selected channel z-score parameters. Sleep/wake is passed through
/// unchanged (mean 0, std 1).
struct NormalizationStats {
  std::vector<Channel> channels;
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct PreprocessReport {
  std::size_t imputed_cells = 0;
  std::size_t segments = 0;
  std::size_t excluded_participants = 0;
  std::vector<std::string> warnings;
};

struct PreprocessResult {
  std::vector<Window> windows;
  NormalizationStats stats;
  PreprocessReport report;
  std::map<std::string, Split> assignment;  // participant id -> split
};

/// Gap interpolation, train-fit z-scoring, non-overlapping windowing and a
/// participant-level split, in that order of data flow:
///   1. runs of <= max_gap missing samples bounded by valid samples on both
///      sides are linearly interpolated (sleep/wake rounded back to {0,1});
///      longer gaps split the trace into segments;
///   2. participants yielding no full window are excluded with a warning;
///   3. remaining participants are shuffled with `split_seed` and assigned
///      round(0.1 n) to validation, round(0.1 n) to test, the rest to train;
///   4. each segment is cut into floor(len / window_length) windows, the
///      remainder dropped;
///   5. activity and light are z-scored with statistics from train windows.
PreprocessResult preprocess(const std::vector<ParticipantRecord>& records, const PreprocessConfig& config);

/// Fills runs of NaN no longer than `max_gap` that have valid neighbours on
/// both sides. Returns the number of filled samples.
std::size_t interpolate_gaps(std::vector<double>& values, std::size_t max_gap, bool round_to_binary);

/// Maximal [begin, end) runs where every listed channel is finite.
std::vector<std::pair<std::size_t, std::size_t>> usable_segments(const ParticipantRecord& record,
                                                                 const std::vector<Channel>& channels);

/// Seeded participant-level split. Ids are sorted before shuffling, so the
/// result does not depend on input order.
std::map<std::string, Split> assign_splits(std::vector<std::string> ids, double val_fraction, double test_fraction,
                                           std::uint64_t seed);

/// Throws std::logic_error if any participant id carries two split tags.
void assert_no_participant_leakage(const std::vector<Window>& windows);

}  // namespace wearssl::data
