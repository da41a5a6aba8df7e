#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wearssl/augment/augment.hpp"
#include "wearssl/byol/train.hpp"
#include "wearssl/data/preprocess.hpp"
#include "wearssl/data/synthetic.hpp"
#include "wearssl/simclr/train.hpp"

namespace wearssl::cli {

/// Invalid configuration; the message names the offending `section.key`.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataSource { kSynthetic, kCsv };
enum class RunMode { kFull, kCheap };

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::filesystem::path samples;  // csv source; default <out>/samples.csv
  std::filesystem::path labels;
  data::SyntheticConfig synthetic = data::SyntheticConfig::defaults();
};

struct SimclrSection {
  simclr::ModelConfig model;
  simclr::TrainConfig train;
  std::size_t max_windows = 0;  // pretraining subset of the train split; 0 = all
};

struct ByolSection {
  byol::ModelConfig model;
  byol::TrainConfig train;
  byol::AutoencoderTrainConfig autoencoder;
  bool autoencoder_init = true;
  std::size_t max_windows = 0;
};

struct SupervisedSection {
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::size_t max_windows = 0;
};

struct ProbeSection {
  std::vector<double> l2_grid = {1e-2, 1e-3, 1e-4};
  double gradient_tolerance = 1e-5;
  int max_iterations = 5000;
};

struct RunConfig {
  DataConfig data;
  data::PreprocessConfig preprocess;
  SimclrSection simclr;
  ByolSection byol;
  SupervisedSection supervised;
  ProbeSection probe;
  RunMode mode = RunMode::kFull;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<data::Task> tasks{data::kAllTasks.begin(), data::kAllTasks.end()};
};

/// Shipped defaults: batch 1024, window 512, ten seeds.
RunConfig default_config();

/// Reads an INI file over the defaults. Unknown sections or keys and
/// unparsable values raise ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

/// Cross-field checks (window length vs receptive field, batch >= 2, ...).
void validate(const RunConfig& config);

/// Every field, in a form `parse_config` reads back to the same config.
std::string to_ini(const RunConfig& config);

/// "3", "0..9" or "1,4,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
/// "all" or a comma-separated list of task names.
std::vector<data::Task> parse_task_list(const std::string& text);

}  // namespace wearssl::cli
