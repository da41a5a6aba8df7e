#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <map>
#include <unistd.h>

#include "wearssl/data/container.hpp"
#include "wearssl/data/csv.hpp"
#include "wearssl/data/preprocess.hpp"
#include "wearssl/data/synthetic.hpp"
#include "wearssl/eval/probe.hpp"
#include "wearssl/simclr/model.hpp"

using namespace wearssl;
using namespace wearssl::data;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("wearssl_data_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

const char* kLabelsHeader = "participant_id,sleep_apnea,diabetes,insomnia,hypertension,metabolic_syndrome\n";
const char* kSamplesHeader = "participant_id,timestamp,activity,light,sleep_wake\n";

ParticipantRecord constant_record(const std::string& id, std::size_t n, double activity, double light) {
  ParticipantRecord r;
  r.participant_id = id;
  r.channel(Channel::kActivity).assign(n, activity);
  r.channel(Channel::kLight).assign(n, light);
  r.channel(Channel::kSleepWake).assign(n, 1.0);
  return r;
}

}  // namespace

TEST_CASE("iso timestamps") {
  CHECK(parse_iso8601("2024-01-01T00:00:30Z") == 1704067230);
  CHECK(format_iso8601(1704067230) == "2024-01-01T00:00:30Z");
  CHECK_THROWS(parse_iso8601("2024-13-01T00:00:00Z"));
  CHECK_THROWS(parse_iso8601("yesterday"));
}

TEST_CASE("csv: header only gives no records") {
  TempDir t;
  write(t.path / "s.csv", kSamplesHeader);
  write(t.path / "l.csv", kLabelsHeader);
  const auto r = parse_actigraphy_csv(t.path / "s.csv", t.path / "l.csv");
  CHECK(r.records.empty());
}

TEST_CASE("csv: rows out of order are sorted and reported") {
  TempDir t;
  write(t.path / "s.csv", std::string(kSamplesHeader) +
                              "A,2024-01-01T00:00:30Z,2,20,1\n"
                              "A,2024-01-01T00:00:00Z,1,10,0\n");
  write(t.path / "l.csv", std::string(kLabelsHeader) + "A,0,1,2,0,1\n");
  const auto r = parse_actigraphy_csv(t.path / "s.csv", t.path / "l.csv");
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].channel(Channel::kActivity) == std::vector<double>{1, 2});
  CHECK(r.records[0].labels == Labels{0, 1, 2, 0, 1});
  CHECK(r.reordered_rows == 1);
  CHECK(!r.warnings.empty());
}

TEST_CASE("csv: one missing activity cell is imputed once") {
  TempDir t;
  std::string s = kSamplesHeader;
  for (int i = 0; i < 600; ++i) {
    const std::string act = i == 300 ? "" : std::to_string(10 + i % 7);
    s += "A," + format_iso8601(1704067200 + 30 * i) + "," + act + ",5,1\n";
  }
  write(t.path / "s.csv", s);
  write(t.path / "l.csv", std::string(kLabelsHeader) + "A,0,0,0,0,0\n");
  const auto r = parse_actigraphy_csv(t.path / "s.csv", t.path / "l.csv");
  CHECK(r.missing_cells == 1);
  PreprocessConfig cfg;
  const auto pre = preprocess(r.records, cfg);
  CHECK(pre.report.imputed_cells == 1);
  CHECK(pre.windows.size() == 1);
}

TEST_CASE("csv: malformed row names its line") {
  TempDir t;
  write(t.path / "s.csv", std::string(kSamplesHeader) + "A,2024-01-01T00:00:00Z,1,1,1\nA,notatime,1,1,1\n");
  write(t.path / "l.csv", std::string(kLabelsHeader) + "A,0,0,0,0,0\n");
  try {
    parse_actigraphy_csv(t.path / "s.csv", t.path / "l.csv");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("csv: unknown participant in labels is a warning") {
  TempDir t;
  write(t.path / "s.csv", std::string(kSamplesHeader) + "A,2024-01-01T00:00:00Z,1,1,1\n");
  write(t.path / "l.csv", std::string(kLabelsHeader) + "A,0,0,0,0,0\nZ,1,1,1,1,1\n");
  const auto r = parse_actigraphy_csv(t.path / "s.csv", t.path / "l.csv");
  CHECK(r.records.size() == 1);
  bool warned = false;
  for (const auto& w : r.warnings) warned = warned || w.find("'Z'") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("csv: write then parse reproduces records") {
  TempDir t;
  auto cfg = SyntheticConfig::defaults();
  cfg.n_participants = 3;
  cfg.days = 0.5;
  cfg.seed = 4;
  const auto recs = generate_synthetic(cfg);
  write_actigraphy_csv(recs, t.path / "s.csv");
  write_labels_csv(recs, t.path / "l.csv");
  const auto back = parse_actigraphy_csv(t.path / "s.csv", t.path / "l.csv");
  REQUIRE(back.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.records[i].participant_id == recs[i].participant_id);
    CHECK(back.records[i].labels == recs[i].labels);
    CHECK(back.records[i].start_time == recs[i].start_time);
    for (std::size_t c = 0; c < kChannelCount; ++c) CHECK(back.records[i].channels[c] == recs[i].channels[c]);
  }
}

TEST_CASE("preprocess: seven days give 39 windows") {
  std::vector<ParticipantRecord> recs{constant_record("A", 20160, 3, 4)};
  const auto r = preprocess(recs, {});
  CHECK(r.windows.size() == 20160 / 512);
  CHECK(r.windows.size() == 39);
  CHECK(r.windows[0].values.shape() == nn::Shape{3, 512});
}

TEST_CASE("preprocess: ten participants split 8/1/1 without leakage") {
  std::vector<ParticipantRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(constant_record("P" + std::to_string(i), 1100, i, 2 * i));
  const auto r = preprocess(recs, {});
  std::map<Split, int> count;
  for (const auto& [id, s] : r.assignment) ++count[s];
  CHECK(count[Split::kTrain] == 8);
  CHECK(count[Split::kValidation] == 1);
  CHECK(count[Split::kTest] == 1);
  CHECK(r.windows.size() == 20);
  CHECK_NOTHROW(assert_no_participant_leakage(r.windows));
  auto leaky = r.windows;
  leaky[1].split = leaky[0].split == Split::kTrain ? Split::kTest : Split::kTrain;
  leaky[1].participant_id = leaky[0].participant_id;
  CHECK_THROWS_AS(assert_no_participant_leakage(leaky), std::logic_error);
}

TEST_CASE("preprocess: constant channel normalizes to zeros") {
  std::vector<ParticipantRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(constant_record("P" + std::to_string(i), 600, 5.0, 7.0));
  const auto r = preprocess(recs, {});
  for (const auto& w : r.windows)
    for (std::size_t i = 0; i < 2 * 512; ++i) CHECK(w.values[i] == 0.0);
}

TEST_CASE("preprocess: gaps, exclusion and window conservation") {
  auto a = constant_record("A", 1500, 1, 1);
  for (std::size_t i = 100; i < 105; ++i) a.channel(Channel::kActivity)[i] = NAN;  // short gap: filled
  for (std::size_t i = 700; i < 760; ++i) a.channel(Channel::kLight)[i] = NAN;     // long gap: split
  auto b = constant_record("B", 400, 1, 1);                                          // too short: excluded
  const auto r = preprocess({a, b}, {});
  CHECK(r.report.imputed_cells == 5);
  CHECK(r.report.excluded_participants == 1);
  // Segments [0, 700) and [760, 1500): 1 + 1 windows.
  CHECK(r.windows.size() == 700 / 512 + 740 / 512);
  for (const auto& w : r.windows) CHECK(w.values.all_finite());
}

TEST_CASE("preprocess: normalization statistics come from the train split only") {
  std::vector<ParticipantRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(constant_record("P" + std::to_string(i), 600, i, 3 * i + 1));
  const auto base = preprocess(recs, {});
  std::string held_out;
  for (const auto& [id, s] : base.assignment)
    if (s != Split::kTrain) held_out = id;
  for (auto& r : recs)
    if (r.participant_id == held_out) r.channel(Channel::kActivity).assign(600, 1e6);
  const auto again = preprocess(recs, {});
  CHECK(again.stats.mean == base.stats.mean);
  CHECK(again.stats.stddev == base.stats.stddev);
}

TEST_CASE("split assignment is seeded and order independent") {
  std::vector<std::string> ids;
  for (int i = 0; i < 30; ++i) ids.push_back("X" + std::to_string(i));
  auto rev = ids;
  std::reverse(rev.begin(), rev.end());
  CHECK(assign_splits(ids, 0.1, 0.1, 3) == assign_splits(rev, 0.1, 0.1, 3));
  CHECK(assign_splits(ids, 0.1, 0.1, 3) != assign_splits(ids, 0.1, 0.1, 4));
}

TEST_CASE("synthetic: prevalence matches the binomial band") {
  auto cfg = SyntheticConfig::defaults();
  cfg.n_participants = 1887;
  cfg.days = 0.01;
  cfg.seed = 11;
  const auto recs = generate_synthetic(cfg);
  int apnea = 0;
  for (const auto& r : recs) apnea += label_of(r.labels, Task::kSleepApnea);
  const double p = 0.0825, n = 1887;
  CHECK(std::abs(apnea - n * p) <= 3 * std::sqrt(n * p * (1 - p)));
  CHECK(reference_prevalence(Task::kSleepApnea)[1] == doctest::Approx(0.0825));
}

TEST_CASE("synthetic: marginals within 2% at n = 5000") {
  auto cfg = SyntheticConfig::defaults();
  cfg.n_participants = 5000;
  cfg.days = 0.01;
  cfg.seed = 12;
  const auto recs = generate_synthetic(cfg);
  for (Task t : kAllTasks) {
    const auto prev = reference_prevalence(t);
    std::vector<double> freq(prev.size());
    for (const auto& r : recs) freq[static_cast<std::size_t>(label_of(r.labels, t))] += 1.0 / 5000;
    for (std::size_t k = 0; k < prev.size(); ++k) CHECK(std::abs(freq[k] - prev[k]) <= 0.02);
  }
}

TEST_CASE("synthetic: deterministic and noise-free traces coincide") {
  auto cfg = SyntheticConfig::defaults();
  cfg.noise_sigma = 0.0;
  cfg.days = 1;
  const Labels l{0, 1, 0, 1, 0};
  const auto a = synthesize_participant("A", l, 42, cfg);
  const auto b = synthesize_participant("B", l, 42, cfg);
  CHECK(a.channels == b.channels);
  cfg.n_participants = 4;
  const auto r1 = generate_synthetic(cfg), r2 = generate_synthetic(cfg);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r1[i].channels == r2[i].channels);
  for (const auto& r : r1) {
    for (double v : r.channel(Channel::kActivity)) CHECK(v >= 0.0);
    for (double v : r.channel(Channel::kSleepWake)) CHECK((v == 0.0 || v == 1.0));
  }
}

TEST_CASE("synthetic: config validation") {
  auto cfg = SyntheticConfig::defaults();
  cfg.prevalence[0] = {0.5, 0.6};
  CHECK_THROWS(validate(cfg));
  cfg = SyntheticConfig::defaults();
  cfg.prevalence[1] = {0.5, 0.5};
  CHECK_THROWS(validate(cfg));
  cfg = SyntheticConfig::defaults();
  cfg.n_participants = 0;
  CHECK_THROWS(validate(cfg));
}

TEST_CASE("synthetic: zero effects leave the probe at the permutation null") {
  // Probe a fixed random encoder on data without class effects, against the
  // same data with labels shuffled across participants.
  auto cfg = SyntheticConfig::defaults();
  cfg.n_participants = 300;
  cfg.days = 0.25;
  cfg.effect_scale = 0.0;
  cfg.seed = 21;
  PreprocessConfig pc;
  pc.window_length = 64;
  const auto pre = preprocess(generate_synthetic(cfg), pc);
  simclr::ModelConfig mc;
  mc.length = 64;
  const auto enc = simclr::make_model(mc, 5).encoder;
  auto emb = eval::extract_embeddings(eval::network_encoder(enc), pre.windows);

  std::vector<std::string> ids;
  for (const auto& [id, s] : pre.assignment) ids.push_back(id);
  double real = 0, null = 0;
  const int runs = 5;
  for (int s = 0; s < runs; ++s) {
    eval::ProbeProtocol p;
    p.bootstrap_seed = s;
    real += eval::evaluate_task(emb, Task::kMetabolicSyndrome, p).test.macro / runs;
    // Participant-level label shuffle.
    auto shuffled = emb;
    std::map<std::string, Labels> by_id;
    for (std::size_t i = 0; i < emb.rows(); ++i) by_id[emb.participant_ids[i]] = emb.labels[i];
    std::vector<Labels> pool;
    for (const auto& [id, l] : by_id) pool.push_back(l);
    Rng rng(100 + s);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t k = 0;
    for (auto& [id, l] : by_id) l = pool[k++];
    for (std::size_t i = 0; i < emb.rows(); ++i) shuffled.labels[i] = by_id[emb.participant_ids[i]];
    null += eval::evaluate_task(shuffled, Task::kMetabolicSyndrome, p).test.macro / runs;
  }
  INFO("real " << real << " null " << null);
  CHECK(std::abs(real - null) < 0.1);
}

TEST_CASE("window container round trip and format errors") {
  TempDir t;
  std::vector<ParticipantRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(constant_record("P" + std::to_string(i), 600, i, i + 1));
  auto pre = preprocess(recs, {});
  const WindowSet set{pre.windows, pre.stats};
  save_windows(set, t.path / "w.bin");
  const auto back = load_windows(t.path / "w.bin");
  REQUIRE(back.windows.size() == set.windows.size());
  for (std::size_t i = 0; i < set.windows.size(); ++i) {
    CHECK(back.windows[i].values == set.windows[i].values);
    CHECK(back.windows[i].participant_id == set.windows[i].participant_id);
    CHECK(back.windows[i].labels == set.windows[i].labels);
    CHECK(back.windows[i].split == set.windows[i].split);
  }
  CHECK(back.stats.mean == set.stats.mean);
  write(t.path / "bad.bin", "garbage");
  CHECK_THROWS(load_windows(t.path / "bad.bin"));
  CHECK_THROWS(load_windows(t.path / "missing.bin"));
}
