#include "wearssl/cli/run.hpp"

#include <CLI11.hpp>

#include <iostream>

#include "wearssl/cli/pipeline.hpp"

namespace wearssl::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-supervised pretraining and linear-probe evaluation on actigraphy windows", "wearssl"};
  app.require_subcommand(1);

  std::string config_path, method, seed, seeds, tasks, out_dir = "out";
  auto common = [&](CLI::App* sub, bool with_method) {
    sub->add_option("--config", config_path, "INI config file (defaults apply when omitted)");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    if (with_method) {
      sub->add_option("--method", method, "simclr, byol, supervised or random")->required();
      auto* one = sub->add_option("--seed", seed, "single run seed");
      sub->add_option("--seeds", seeds, "seed range N..M or list a,b,c")->excludes(one);
      sub->add_option("--tasks", tasks, "'all' or comma-separated task names");
    }
  };
  auto* generate = app.add_subcommand("generate", "write synthetic samples.csv and labels.csv");
  auto* preprocess = app.add_subcommand("preprocess", "window the data source into windows.bin");
  auto* pretrain = app.add_subcommand("pretrain", "train one method for each run seed");
  auto* probe = app.add_subcommand("probe", "linear-probe evaluation, one run per seed");
  auto* report = app.add_subcommand("report", "aggregate method reports into one table");
  common(generate, false);
  common(preprocess, false);
  common(pretrain, true);
  common(probe, true);
  common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = config_path.empty() ? default_config() : load_config(config_path);
    try {
      if (!seed.empty()) config.seeds = parse_seed_list(seed);
      if (!seeds.empty()) config.seeds = parse_seed_list(seeds);
      if (!tasks.empty()) config.tasks = parse_task_list(tasks);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("command line: ") + e.what());
    }
    validate(config);
    const Layout layout{out_dir};

    if (generate->parsed()) {
      if (config.data.source != DataSource::kSynthetic) throw ConfigError("data.source: generate needs synthetic");
      cli::generate(config, layout, err);
    } else if (preprocess->parsed()) {
      cli::preprocess(config, layout, err);
    } else if (pretrain->parsed()) {
      cli::pretrain(config, method, layout, err);
    } else if (probe->parsed()) {
      const auto r = cli::probe(config, method, layout, err);
      out << eval::format_table(r, kMethods);
    } else if (report->parsed()) {
      out << cli::report(layout);
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const MissingArtifact& e) {
    err << "error: missing " << e.file().string() << " (run the earlier stage first)\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace wearssl::cli
