#include "wearssl/cli/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "wearssl/byol/train.hpp"
#include "wearssl/cli/supervised.hpp"
#include "wearssl/data/container.hpp"
#include "wearssl/data/csv.hpp"
#include "wearssl/eval/probe.hpp"
#include "wearssl/nn/rng.hpp"
#include "wearssl/simclr/train.hpp"

namespace wearssl::cli {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

std::string loss_csv(const std::vector<double>& losses) {
  std::string out = "epoch,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < losses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, losses[i]);
    out += buf;
  }
  return out;
}

void save(const nn::Checkpoint& ckpt, const fs::path& path) {
  fs::create_directories(path.parent_path());
  nn::save_checkpoint(ckpt, path);
}

std::string with_seeds(const RunConfig& config, const std::string& method) {
  std::string text = "# method = " + method + "\n" + to_ini(config);
  return text;
}

data::WindowSet load_set(const Layout& out) {
  if (!fs::exists(out.windows())) throw MissingArtifact(out.windows());
  data::WindowSet set = data::load_windows(out.windows());
  data::assert_no_participant_leakage(set.windows);
  return set;
}

simclr::ModelConfig simclr_model(const RunConfig& c) {
  simclr::ModelConfig m = c.simclr.model;
  m.channels = c.preprocess.channels.size();
  m.length = c.preprocess.window_length;
  return m;
}


void pretrain_simclr(const RunConfig& c, const std::vector<data::Window>& all, std::uint64_t seed, const Layout& out,
                     std::ostream& log) {
  const auto windows = pretraining_windows(all, c.simclr.max_windows, seed);
  simclr::TrainConfig tc = c.simclr.train;
  tc.seed = derive_seed(seed, {0x51c});
  log << "simclr seed " << seed << ": " << windows.size() << " windows\n";
  auto result = simclr::train_simclr(windows, simclr::make_model(simclr_model(c), seed), tc,
                                     [&](const simclr::EpochInfo& e) {
                                       log << "  epoch " << e.epoch << " loss " << e.mean_loss << '\n';
                                     });
  save(simclr::to_checkpoint(result.model), out.checkpoint("simclr", seed));
  write_text(out.run_dir("simclr", seed) / "loss.csv", loss_csv(result.epoch_loss));
}

void pretrain_byol(const RunConfig& c, const std::vector<data::Window>& all, std::uint64_t seed, const Layout& out,
                   std::ostream& log, const byol::StepObserver& observe) {
  const auto windows = pretraining_windows(all, c.byol.max_windows, seed);
  log << "byol seed " << seed << ": " << windows.size() << " windows\n";
  const nn::Shape sample{windows.front().channels(), windows.front().length()};
  byol::ByolModel model;
  fs::create_directories(out.run_dir("byol", seed));
  if (c.byol.autoencoder_init) {
    byol::AutoencoderTrainConfig ac = c.byol.autoencoder;
    ac.seed = derive_seed(seed, {0xae});
    auto ae = byol::pretrain_autoencoder(windows, c.byol.model.encoder, ac);
    log << "  autoencoder mse " << ae.initial_mse << " -> " << ae.final_mse << '\n';
    save(byol::to_checkpoint(ae.model), out.run_dir("byol", seed) / "autoencoder.ckpt");
    write_text(out.run_dir("byol", seed) / "autoencoder_loss.csv", loss_csv(ae.epoch_loss));
    model = byol::make_model(c.byol.model, ae.model.encoder, ae.model.scaler, derive_seed(seed, {0xb0}));
  } else {
    model = byol::make_random_model(c.byol.model, sample, byol::fit_min_max(windows), derive_seed(seed, {0xb0}));
  }
  byol::TrainConfig tc = c.byol.train;
  tc.seed = derive_seed(seed, {0xb71});
  std::size_t last_epoch = 0;
  auto result = byol::train_byol(windows, std::move(model), tc, [&](const byol::StepInfo& s, const byol::ByolModel& m) {
    if (s.epoch != last_epoch) log << "  epoch " << last_epoch << " done\n";
    last_epoch = s.epoch;
    if (observe) observe(s, m);
  });
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
    if (e + 1 == result.epoch_loss.size() || e % 10 == 0)
      log << "  epoch " << e << " loss " << result.epoch_loss[e] << '\n';
  save(byol::to_checkpoint(result.model), out.checkpoint("byol", seed));
  write_text(out.run_dir("byol", seed) / "loss.csv", loss_csv(result.epoch_loss));
}

void pretrain_supervised(const RunConfig& c, const std::vector<data::Window>& all, std::uint64_t seed,
                         const Layout& out, std::ostream& log) {
  const auto windows = pretraining_windows(all, c.supervised.max_windows, seed);
  for (data::Task task : c.tasks) {
    std::vector<double> losses;
    auto model = train_supervised(windows, make_supervised(simclr_model(c), task, seed), c.supervised,
                                  derive_seed(seed, {0x50b, static_cast<std::uint64_t>(task)}), &losses);
    log << "supervised seed " << seed << " " << data::task_name(task) << ": loss "
        << (losses.empty() ? 0.0 : losses.front()) << " -> " << (losses.empty() ? 0.0 : losses.back()) << '\n';
    save(to_checkpoint(model), out.supervised_checkpoint(seed, task));
    write_text(out.run_dir("supervised", seed) / ("loss_" + std::string(data::task_name(task)) + ".csv"),
               loss_csv(losses));
  }
}

void require_method(const std::string& method) {
  if (std::find(kMethods.begin(), kMethods.end(), method) == kMethods.end())
    throw ConfigError("unknown method '" + method + "' (expected simclr, byol, supervised or random)");
}

nn::Checkpoint load_required(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifact(path);
  return nn::load_checkpoint(path);
}

eval::ProbeProtocol protocol(const RunConfig& c, std::optional<std::uint64_t> bootstrap) {
  eval::ProbeProtocol p;
  p.l2_grid = c.probe.l2_grid;
  p.probe.gradient_tolerance = c.probe.gradient_tolerance;
  p.probe.max_iterations = c.probe.max_iterations;
  p.bootstrap_seed = bootstrap;
  return p;
}

}  // namespace

std::vector<data::Window> pretraining_windows(const std::vector<data::Window>& all, std::size_t max_windows,
                                              std::uint64_t seed) {
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].split == data::Split::kTrain) train.push_back(i);
  if (max_windows > 0 && max_windows < train.size()) {
    const auto order = augment::epoch_order(train.size(), derive_seed(seed, {0x5ab5e7}), 0);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < max_windows; ++k) keep.push_back(train[order[k]]);
    std::sort(keep.begin(), keep.end());
    train = std::move(keep);
  }
  std::vector<data::Window> out;
  out.reserve(train.size());
  for (std::size_t i : train) out.push_back(all[i]);
  if (out.empty()) throw std::runtime_error("no training windows to pretrain on");
  return out;
}

std::vector<std::uint64_t> pretrain_seeds(const RunConfig& config, const std::string& method) {
  if (config.mode == RunMode::kCheap && method != "supervised") return {config.seeds.front()};
  return config.seeds;
}

void generate(const RunConfig& config, const Layout& out, std::ostream& log) {
  const auto records = data::generate_synthetic(config.data.synthetic);
  fs::create_directories(out.root);
  data::write_actigraphy_csv(records, out.samples());
  data::write_labels_csv(records, out.labels());
  write_text(out.config(), to_ini(config));
  log << "generated " << records.size() << " participants\n";
}

void preprocess(const RunConfig& config, const Layout& out, std::ostream& log) {
  std::vector<data::ParticipantRecord> records;
  if (config.data.source == DataSource::kSynthetic) {
    records = data::generate_synthetic(config.data.synthetic);
  } else {
    const fs::path samples = config.data.samples.empty() ? out.samples() : config.data.samples;
    const fs::path labels = config.data.labels.empty() ? out.labels() : config.data.labels;
    if (!fs::exists(samples)) throw MissingArtifact(samples);
    if (!fs::exists(labels)) throw MissingArtifact(labels);
    auto parsed = data::parse_actigraphy_csv(samples, labels);
    for (const auto& w : parsed.warnings) log << "warning: " << w << '\n';
    records = std::move(parsed.records);
  }
  auto result = data::preprocess(records, config.preprocess);
  for (const auto& w : result.report.warnings) log << "warning: " << w << '\n';
  data::assert_no_participant_leakage(result.windows);
  data::save_windows({std::move(result.windows), std::move(result.stats)}, out.windows());
  write_text(out.config(), to_ini(config));
  log << "preprocessed " << records.size() << " participants, " << result.report.imputed_cells
      << " imputed cells\n";
}

void pretrain(const RunConfig& config, const std::string& method, const Layout& out, std::ostream& log,
              const byol::StepObserver& observe) {
  require_method(method);
  if (method == "random") throw ConfigError("method random has no pretraining stage");
  const data::WindowSet set = load_set(out);
  for (std::uint64_t seed : pretrain_seeds(config, method)) {
    if (method == "simclr")
      pretrain_simclr(config, set.windows, seed, out, log);
    else if (method == "byol")
      pretrain_byol(config, set.windows, seed, out, log, observe);
    else
      pretrain_supervised(config, set.windows, seed, out, log);
  }
  write_text(out.method_dir(method) / "pretrain.ini", with_seeds(config, method));
}

eval::MetricsReport probe(const RunConfig& config, const std::string& method, const Layout& out, std::ostream& log) {
  require_method(method);
  const data::WindowSet set = load_set(out);
  const bool cheap = config.mode == RunMode::kCheap;
  const std::uint64_t first = config.seeds.front();

  // Every checkpoint the runs need is checked before any work starts.
  std::vector<fs::path> needed;
  for (std::uint64_t seed : config.seeds) {
    const std::uint64_t ck = cheap ? first : seed;
    if (method == "simclr" || method == "byol") needed.push_back(out.checkpoint(method, ck));
    if (method == "supervised")
      for (data::Task t : config.tasks) needed.push_back(out.supervised_checkpoint(seed, t));
  }
  for (const auto& p : needed)
    if (!fs::exists(p)) throw MissingArtifact(p);

  eval::MetricsReport report;
  report.seeds = config.seeds;
  std::vector<data::Window> test;
  for (const auto& w : set.windows)
    if (w.split == data::Split::kTest) test.push_back(w);

  for (std::uint64_t seed : config.seeds) {
    const std::optional<std::uint64_t> bootstrap = cheap ? std::optional(seed) : std::nullopt;
    if (method == "supervised") {
      for (data::Task t : config.tasks) {
        const auto model = supervised_from_checkpoint(nn::load_checkpoint(out.supervised_checkpoint(seed, t)));
        std::vector<int> y;
        for (const auto& w : test) y.push_back(data::label_of(w.labels, t));
        report.add(method, t, eval::f1_scores(predict(model, test), y, data::class_count(t)));
      }
      log << method << " seed " << seed << " done\n";
      continue;
    }

    eval::EmbeddingSet emb;
    if (method == "byol") {
      const auto model = byol::from_checkpoint(load_required(out.checkpoint(method, cheap ? first : seed)));
      emb = eval::extract_embeddings([&](const nn::Tensor& x) { return byol::encode(model, x); }, set.windows);
    } else {
      const nn::Network encoder =
          method == "simclr"
              ? simclr::from_checkpoint(load_required(out.checkpoint(method, cheap ? first : seed))).encoder
              : simclr::make_model(simclr_model(config), derive_seed(seed, {0x7a4d})).encoder;
      emb = eval::extract_embeddings(eval::network_encoder(encoder), set.windows);
    }
    for (data::Task t : config.tasks) {
      const auto outcome = eval::evaluate_task(emb, t, protocol(config, bootstrap));
      report.add(method, t, outcome.test);
    }
    log << method << " seed " << seed << " done\n";
  }

  write_text(out.method_report(method), eval::to_json(report).dump(2) + "\n");
  write_text(out.method_dir(method) / "probe.ini", with_seeds(config, method));
  return report;
}

std::string report(const Layout& out) {
  eval::MetricsReport all;
  std::set<std::vector<std::uint64_t>> seed_lists;
  bool any = false;
  for (const auto& method : kMethods) {
    const fs::path p = out.method_report(method);
    if (!fs::exists(p)) continue;
    std::ifstream f(p);
    const auto r = eval::report_from_json(nlohmann::json::parse(f));
    seed_lists.insert(r.seeds);
    for (const auto& [m, tasks] : r.methods) all.methods[m] = tasks;
    all.seeds = r.seeds;
    any = true;
  }
  if (!any) throw MissingArtifact(out.method_report("<method>"));
  if (seed_lists.size() > 1) throw std::runtime_error("method reports were produced with different seed lists");
  const std::string table = eval::format_table(all, kMethods);
  write_text(out.report_json(), eval::to_json(all).dump(2) + "\n");
  write_text(out.report_table(), table);
  return table;
}

}  // namespace wearssl::cli
