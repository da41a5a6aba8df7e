#pragma once

#include <cstdint>
#include <vector>

#include "wearssl/cli/config.hpp"
#include "wearssl/eval/metrics.hpp"
#include "wearssl/nn/checkpoint.hpp"

namespace wearssl::cli {

/// Task-specific baseline: the SimCLR encoder with a softmax layer on top,
/// trained end-to-end on window labels with Adam.
struct SupervisedModel {
  data::Task task = data::Task::kSleepApnea;
  nn::Network net;  // (batch, C, L) -> (batch, n_classes) logits
};

SupervisedModel make_supervised(const simclr::ModelConfig& encoder, data::Task task, std::uint64_t seed);

/// Mean softmax cross-entropy per epoch is returned in `epoch_loss`.
SupervisedModel train_supervised(const std::vector<data::Window>& windows, SupervisedModel model,
                                 const SupervisedSection& config, std::uint64_t seed,
                                 std::vector<double>* epoch_loss = nullptr);

std::vector<int> predict(const SupervisedModel& model, const std::vector<data::Window>& windows);

nn::Checkpoint to_checkpoint(const SupervisedModel& model);
SupervisedModel supervised_from_checkpoint(const nn::Checkpoint& ckpt);

}  // namespace wearssl::cli
