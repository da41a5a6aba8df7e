#include "wearssl/data/types.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace wearssl::data {

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kSleepApnea: return "sleep_apnea";
    case Task::kDiabetes: return "diabetes";
    case Task::kInsomnia: return "insomnia";
    case Task::kHypertension: return "hypertension";
    case Task::kMetabolicSyndrome: return "metabolic_syndrome";
  }
  return "unknown";
}

std::string_view task_title(Task task) {
  switch (task) {
    case Task::kSleepApnea: return "Sleep Apnea";
    case Task::kDiabetes: return "Diabetes";
    case Task::kInsomnia: return "Insomnia";
    case Task::kHypertension: return "Hypertension";
    case Task::kMetabolicSyndrome: return "Metabolic Syndrome";
  }
  return "Unknown";
}

std::optional<Task> parse_task(std::string_view name) {
  for (Task t : kAllTasks)
    if (task_name(t) == name) return t;
  return std::nullopt;
}

std::size_t class_count(Task task) {
  return task == Task::kDiabetes || task == Task::kInsomnia ? 3 : 2;
}

std::string_view class_name(Task task, int code) {
  switch (task) {
    case Task::kDiabetes: {
      static constexpr std::string_view names[] = {"non-diabetic", "pre-diabetic", "diabetic"};
      return code >= 0 && code < 3 ? names[code] : "invalid";
    }
    case Task::kInsomnia: {
      static constexpr std::string_view names[] = {"not clinically significant", "subthreshold",
                                                   "moderate to severe"};
      return code >= 0 && code < 3 ? names[code] : "invalid";
    }
    default:
      return code == 0 ? "no" : code == 1 ? "yes" : "invalid";
  }
}

std::vector<double> reference_prevalence(Task task) {
  switch (task) {
    case Task::kSleepApnea: return {0.9175, 0.0825};
    case Task::kDiabetes: return {0.469, 0.350, 0.181};
    case Task::kInsomnia: return {0.598, 0.225, 0.177};
    case Task::kHypertension: return {0.749, 0.251};
    case Task::kMetabolicSyndrome: return {0.663, 0.337};
  }
  return {};
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

std::string_view channel_name(Channel channel) {
  switch (channel) {
    case Channel::kActivity: return "activity";
    case Channel::kLight: return "light";
    case Channel::kSleepWake: return "sleep_wake";
  }
  return "unknown";
}

std::optional<Channel> parse_channel(std::string_view name) {
  for (std::uint8_t c = 0; c < kChannelCount; ++c)
    if (channel_name(static_cast<Channel>(c)) == name) return static_cast<Channel>(c);
  return std::nullopt;
}

nn::Tensor batch_values(const std::vector<const Window*>& windows) {
  if (windows.empty()) throw std::invalid_argument("empty window batch");
  const nn::Shape s = windows.front()->values.shape();
  nn::Tensor out({windows.size(), s.at(0), s.at(1)});
  const std::size_t stride = s[0] * s[1];
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i]->values.shape() != s)
      throw std::invalid_argument("window " + std::to_string(i) + " has shape " +
                                  nn::to_string(windows[i]->values.shape()) + ", expected " + nn::to_string(s));
    std::memcpy(out.data() + i * stride, windows[i]->values.data(), stride * sizeof(double));
  }
  return out;
}

nn::Tensor batch_values(const std::vector<Window>& windows) {
  std::vector<const Window*> ptrs;
  ptrs.reserve(windows.size());
  for (const Window& w : windows) ptrs.push_back(&w);
  return batch_values(ptrs);
}

}  // namespace wearssl::data
