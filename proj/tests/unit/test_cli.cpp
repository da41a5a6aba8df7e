#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "wearssl/cli/config.hpp"
#include "wearssl/cli/pipeline.hpp"
#include "wearssl/cli/run.hpp"

using namespace wearssl;
using namespace wearssl::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("wearssl_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "wearssl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

const char* kTiny = R"([synthetic]
participants = 12
days = 0.5

[preprocess]
window_length = 64

[simclr]
batch_size = 8
epochs = 1
)";

}  // namespace

TEST_CASE("config: defaults validate and survive an ini round trip") {
  const auto c = default_config();
  CHECK_NOTHROW(validate(c));
  CHECK(c.simclr.train.batch_size == 1024);
  CHECK(c.byol.train.batch_size == 1024);
  CHECK(c.seeds.size() == 10);
  const auto back = parse_config(to_ini(c));
  CHECK(to_ini(back) == to_ini(c));
}

TEST_CASE("config: overrides parse") {
  const auto c = parse_config("[run]\nmode = cheap\nseeds = 1,4,7\ntasks = diabetes\n[simclr]\nbase_lr = 2.5\n");
  CHECK(c.mode == RunMode::kCheap);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 4, 7});
  CHECK(c.tasks == std::vector<data::Task>{data::Task::kDiabetes});
  CHECK(c.simclr.train.base_lr == 2.5);
  CHECK(parse_seed_list("0..3") == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK(parse_task_list("all").size() == 5);
}

TEST_CASE("config: unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(parse_config("[simclr]\nbatchsize = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[simclr]\nbatch_size = many\n"), ConfigError);
  CHECK_THROWS_AS(validate(parse_config("[simclr]\ntemperature = 0\n")), ConfigError);
  CHECK_THROWS(parse_seed_list("3..1"));
  CHECK_THROWS(parse_task_list("cancer"));
}

TEST_CASE("cli: exit codes") {
  TempDir t("codes");
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"pretrain", "--out", t.path.string()}).code == 2);  // --method missing
  write_text(t.path / "bad.ini", "[simclr]\nbatch_size = -3\n");
  const auto bad = invoke({"generate", "--config", (t.path / "bad.ini").string(), "--out", t.path.string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("config error") != std::string::npos);
}

TEST_CASE("cli: probing before pretraining names the missing checkpoint") {
  TempDir t("missing");
  write_text(t.path / "tiny.ini", kTiny);
  const std::string cfg = (t.path / "tiny.ini").string(), out = (t.path / "run").string();
  REQUIRE(invoke({"generate", "--config", cfg, "--out", out}).code == 0);
  REQUIRE(invoke({"preprocess", "--config", cfg, "--out", out}).code == 0);
  const auto r = invoke({"probe", "--config", cfg, "--out", out, "--method", "simclr", "--seed", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("model.ckpt") != std::string::npos);
}

TEST_CASE("cli: generate is byte-identical across invocations") {
  TempDir t("gen");
  write_text(t.path / "g.ini", "[synthetic]\nparticipants = 100\nseed = 7\ndays = 0.25\n");
  const std::string cfg = (t.path / "g.ini").string();
  REQUIRE(invoke({"generate", "--config", cfg, "--out", (t.path / "a").string()}).code == 0);
  REQUIRE(invoke({"generate", "--config", cfg, "--out", (t.path / "b").string()}).code == 0);
  CHECK(slurp(t.path / "a" / "samples.csv") == slurp(t.path / "b" / "samples.csv"));
  CHECK(slurp(t.path / "a" / "labels.csv") == slurp(t.path / "b" / "labels.csv"));
  CHECK(!slurp(t.path / "a" / "samples.csv").empty());
}

TEST_CASE("cli: pretrain then probe writes a method report") {
  TempDir t("flow");
  write_text(t.path / "tiny.ini", std::string(kTiny) + "[run]\nseeds = 0..1\ntasks = hypertension\n");
  const std::string cfg = (t.path / "tiny.ini").string(), out = (t.path / "run").string();
  REQUIRE(invoke({"generate", "--config", cfg, "--out", out}).code == 0);
  REQUIRE(invoke({"preprocess", "--config", cfg, "--out", out}).code == 0);
  REQUIRE(invoke({"pretrain", "--config", cfg, "--out", out, "--method", "simclr"}).code == 0);
  CHECK(fs::exists(Layout{out}.checkpoint("simclr", 0)));
  CHECK(fs::exists(Layout{out}.checkpoint("simclr", 1)));
  REQUIRE(invoke({"probe", "--config", cfg, "--out", out, "--method", "simclr"}).code == 0);
  const auto r = invoke({"report", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(Layout{out}.report_json()));
  CHECK(slurp(Layout{out}.report_table()).find("simclr") != std::string::npos);
}
