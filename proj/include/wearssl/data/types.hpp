#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wearssl/nn/tensor.hpp"

namespace wearssl::data {

/// The five downstream classification tasks, in report column order.
enum class Task : std::uint8_t {
  kSleepApnea = 0,
  kDiabetes = 1,
  kInsomnia = 2,
  kHypertension = 3,
  kMetabolicSyndrome = 4,
};

inline constexpr std::size_t kTaskCount = 5;
inline constexpr std::array<Task, kTaskCount> kAllTasks = {Task::kSleepApnea, Task::kDiabetes, Task::kInsomnia,
                                                          Task::kHypertension, Task::kMetabolicSyndrome};

std::string_view task_name(Task task);        // "sleep_apnea", ...
std::string_view task_title(Task task);       // "Sleep Apnea", ...
std::optional<Task> parse_task(std::string_view name);

/// Number of classes: diabetes and insomnia are 3-class, the rest binary.
std::size_t class_count(Task task);

/// Human-readable name of an integer class code.
///   sleep_apnea, hypertension, metabolic_syndrome: 0 = no, 1 = yes
///   diabetes: 0 = non-diabetic, 1 = pre-diabetic, 2 = diabetic
///   insomnia: 0 = not clinically significant, 1 = subthreshold,
///             2 = moderate to severe
std::string_view class_name(Task task, int code);

/// Reference prevalence of each class code (sums to 1 per task).
std::vector<double> reference_prevalence(Task task);

/// One integer class code per task, indexed by static_cast<size_t>(Task).
using Labels = std::array<int, kTaskCount>;

inline int label_of(const Labels& labels, Task task) { return labels[static_cast<std::size_t>(task)]; }

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };
std::string_view split_name(Split split);

/// Recorded channels, in storage order.
enum class Channel : std::uint8_t { kActivity = 0, kLight = 1, kSleepWake = 2 };
inline constexpr std::size_t kChannelCount = 3;
std::string_view channel_name(Channel channel);
std::optional<Channel> parse_channel(std::string_view name);

inline constexpr std::int64_t kSamplePeriodSeconds = 30;
inline constexpr std::size_t kSamplesPerDay = 24 * 60 * 60 / kSamplePeriodSeconds;  // 2880

/// One participant's trace on a uniform 30-second grid. Missing samples are
/// stored as NaN. Sleep/wake uses 1 = awake, 0 = asleep.
struct ParticipantRecord {
  std::string participant_id;
  std::int64_t start_time = 0;  // unix seconds of the first grid slot
  std::array<std::vector<double>, kChannelCount> channels;
  Labels labels{};

  std::size_t length() const noexcept { return channels[0].size(); }
  std::vector<double>& channel(Channel c) { return channels[static_cast<std::size_t>(c)]; }
  const std::vector<double>& channel(Channel c) const { return channels[static_cast<std::size_t>(c)]; }
};

/// A fixed-length multichannel segment: the sample unit for all training.
struct Window {
  nn::Tensor values;  // (channels, length)
  std::string participant_id;
  Labels labels{};
  Split split = Split::kTrain;

  std::size_t channels() const { return values.dim(0); }
  std::size_t length() const { return values.dim(1); }
};

/// Stacks window values into a (batch, channels, length) tensor.
nn::Tensor batch_values(const std::vector<const Window*>& windows);
nn::Tensor batch_values(const std::vector<Window>& windows);

}  // namespace wearssl::data
