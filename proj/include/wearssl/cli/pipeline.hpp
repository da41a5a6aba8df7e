#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wearssl/byol/train.hpp"
#include "wearssl/cli/config.hpp"
#include "wearssl/data/types.hpp"
#include "wearssl/eval/report.hpp"

namespace wearssl::cli {

/// An input file a stage needs was never produced.
class MissingArtifact : public std::runtime_error {
 public:
  explicit MissingArtifact(const std::filesystem::path& file)
      : std::runtime_error("missing " + file.string()), file_(file) {}
  const std::filesystem::path& file() const noexcept { return file_; }

 private:
  std::filesystem::path file_;
};

/// Methods in report row order. "random" is the untrained SimCLR encoder.
inline const std::vector<std::string> kMethods = {"simclr", "byol", "supervised", "random"};

/// Files inside an output directory.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.ini"; }
  std::filesystem::path samples() const { return root / "samples.csv"; }
  std::filesystem::path labels() const { return root / "labels.csv"; }
  std::filesystem::path windows() const { return root / "windows.bin"; }
  std::filesystem::path method_dir(const std::string& method) const { return root / method; }
  std::filesystem::path run_dir(const std::string& method, std::uint64_t seed) const {
    return method_dir(method) / ("seed_" + std::to_string(seed));
  }
  std::filesystem::path checkpoint(const std::string& method, std::uint64_t seed) const {
    return run_dir(method, seed) / "model.ckpt";
  }
  std::filesystem::path supervised_checkpoint(std::uint64_t seed, data::Task task) const {
    return run_dir("supervised", seed) / ("model_" + std::string(data::task_name(task)) + ".ckpt");
  }
  std::filesystem::path method_report(const std::string& method) const { return method_dir(method) / "report.json"; }
  std::filesystem::path report_json() const { return root / "report.json"; }
  std::filesystem::path report_table() const { return root / "report.txt"; }
};

/// Seeds whose pretraining a method needs: all of them in full mode, only
/// the first in cheap mode (supervised always trains once per seed).
std::vector<std::uint64_t> pretrain_seeds(const RunConfig& config, const std::string& method);

/// Train-split windows a pretraining run sees: all of them, or a subset of
/// `max_windows` drawn with `seed` and kept in dataset order.
std::vector<data::Window> pretraining_windows(const std::vector<data::Window>& all, std::size_t max_windows,
                                              std::uint64_t seed);

/// Synthetic participants to samples.csv / labels.csv.
void generate(const RunConfig& config, const Layout& out, std::ostream& log);

/// Data source to windows.bin.
void preprocess(const RunConfig& config, const Layout& out, std::ostream& log);

/// Trains `method` for its pretraining seeds; writes checkpoints and
/// per-epoch loss CSVs under <out>/<method>/seed_<s>/. `observe` sees every
/// BYOL step.
void pretrain(const RunConfig& config, const std::string& method, const Layout& out, std::ostream& log,
              const byol::StepObserver& observe = {});

/// One run per configured seed. In cheap mode every run reuses the first
/// seed's checkpoint and draws its probe training set as a participant
/// bootstrap with the run seed. Writes <out>/<method>/report.json.
eval::MetricsReport probe(const RunConfig& config, const std::string& method, const Layout& out, std::ostream& log);

/// Collects every method report under `out` into report.json and the
/// table in report.txt. Returns the table.
std::string report(const Layout& out);

/// Writes `text` only through a temporary file renamed into place.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace wearssl::cli
