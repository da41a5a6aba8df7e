#include "wearssl/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace wearssl::data {

CsvError::CsvError(const std::string& file, std::size_t line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::unordered_map<std::string, std::size_t> header_columns(std::string_view header) {
  std::unordered_map<std::string, std::size_t> cols;
  const auto fields = split_fields(header);
  for (std::size_t i = 0; i < fields.size(); ++i) cols.emplace(std::string(fields[i]), i);
  return cols;
}

std::size_t require_column(const std::unordered_map<std::string, std::size_t>& cols, const std::string& name,
                           const std::string& file) {
  auto it = cols.find(name);
  if (it == cols.end()) throw CsvError(file, 1, "missing column '" + name + "'");
  return it->second;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Row {
  std::int64_t time;
  std::array<double, kChannelCount> values;
  std::size_t line;
};

}  // namespace

std::int64_t parse_iso8601(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS with an optional trailing 'Z'
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':' || !parse_number(text.substr(0, 4), y) ||
      !parse_number(text.substr(5, 2), mo) || !parse_number(text.substr(8, 2), d) ||
      !parse_number(text.substr(11, 2), h) || !parse_number(text.substr(14, 2), mi) ||
      !parse_number(text.substr(17, 2), s))
    throw std::invalid_argument("not an ISO-8601 timestamp: '" + std::string(text) + "'");
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59)
    throw std::invalid_argument("invalid calendar time: '" + std::string(text) + "'");
  return sys_days{ymd}.time_since_epoch().count() * 86400LL + h * 3600LL + mi * 60LL + s;
}

std::string format_iso8601(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const std::int64_t days = unix_seconds >= 0 ? unix_seconds / 86400 : -((-unix_seconds + 86399) / 86400);
  const std::int64_t rem = unix_seconds - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

std::map<std::string, Labels> parse_labels_csv(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels file " + file);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(file, 1, "missing header row");
  const auto cols = header_columns(line);
  const std::size_t id_col = require_column(cols, "participant_id", file);
  std::array<std::size_t, kTaskCount> task_cols{};
  for (Task t : kAllTasks) task_cols[static_cast<std::size_t>(t)] = require_column(cols, std::string(task_name(t)), file);

  std::map<std::string, Labels> out;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != cols.size())
      throw CsvError(file, line_no, "expected " + std::to_string(cols.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    Labels labels{};
    for (Task t : kAllTasks) {
      const auto ti = static_cast<std::size_t>(t);
      int code = -1;
      if (!parse_number(fields[task_cols[ti]], code) || code < 0 || code >= static_cast<int>(class_count(t)))
        throw CsvError(file, line_no, "invalid " + std::string(task_name(t)) + " code '" +
                                          std::string(fields[task_cols[ti]]) + "'");
      labels[ti] = code;
    }
    const std::string id(fields[id_col]);
    if (id.empty()) throw CsvError(file, line_no, "empty participant_id");
    if (!out.emplace(id, labels).second) throw CsvError(file, line_no, "duplicate participant_id '" + id + "'");
  }
  return out;
}

ParseResult parse_actigraphy_csv(const std::filesystem::path& samples, const std::filesystem::path& labels_path) {
  const std::string file = samples.string();
  std::ifstream in(samples);
  if (!in) throw std::runtime_error("cannot open samples file " + file);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(file, 1, "missing header row");
  const auto cols = header_columns(line);
  const std::size_t id_col = require_column(cols, "participant_id", file);
  const std::size_t time_col = require_column(cols, "timestamp", file);
  std::array<std::size_t, kChannelCount> value_cols{};
  for (std::size_t c = 0; c < kChannelCount; ++c)
    value_cols[c] = require_column(cols, std::string(channel_name(static_cast<Channel>(c))), file);

  ParseResult result;
  std::map<std::string, std::vector<Row>> rows_by_id;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != cols.size())
      throw CsvError(file, line_no, "expected " + std::to_string(cols.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    const std::string id(fields[id_col]);
    if (id.empty()) throw CsvError(file, line_no, "empty participant_id");
    Row row{};
    row.line = line_no;
    try {
      row.time = parse_iso8601(fields[time_col]);
    } catch (const std::invalid_argument& e) {
      throw CsvError(file, line_no, e.what());
    }
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const std::string_view cell = fields[value_cols[c]];
      if (cell.empty()) {
        row.values[c] = kMissing;
        ++result.missing_cells;
        continue;
      }
      double v = 0.0;
      if (!parse_number(cell, v) || !std::isfinite(v))
        throw CsvError(file, line_no, "invalid " + std::string(channel_name(static_cast<Channel>(c))) + " value '" +
                                          std::string(cell) + "'");
      if (static_cast<Channel>(c) == Channel::kSleepWake ? (v != 0.0 && v != 1.0) : v < 0.0)
        throw CsvError(file, line_no, "out-of-range " + std::string(channel_name(static_cast<Channel>(c))) +
                                          " value '" + std::string(cell) + "'");
      row.values[c] = v;
    }
    auto& rows = rows_by_id[id];
    if (!rows.empty() && row.time < rows.back().time) ++result.reordered_rows;
    rows.push_back(row);
    ++result.rows;
  }
  if (result.reordered_rows > 0)
    result.warnings.push_back(std::to_string(result.reordered_rows) + " row(s) out of time order were sorted");

  const auto labels = parse_labels_csv(labels_path);
  for (const auto& [id, _] : labels)
    if (!rows_by_id.contains(id)) result.warnings.push_back("labels file lists unknown participant '" + id + "'");

  for (auto& [id, rows] : rows_by_id) {
    auto lab = labels.find(id);
    if (lab == labels.end()) {
      result.warnings.push_back("participant '" + id + "' has no labels and was skipped");
      continue;
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
    ParticipantRecord rec;
    rec.participant_id = id;
    rec.labels = lab->second;
    rec.start_time = rows.front().time;
    const std::int64_t span = rows.back().time - rec.start_time;
    const std::size_t slots = static_cast<std::size_t>(span / kSamplePeriodSeconds) + 1;
    for (auto& ch : rec.channels) ch.assign(slots, kMissing);
    std::vector<bool> filled(slots, false);
    for (const Row& r : rows) {
      const std::int64_t offset = r.time - rec.start_time;
      if (offset % kSamplePeriodSeconds != 0)
        throw CsvError(file, r.line, "timestamp is not on the 30 s grid of participant '" + id + "'");
      const auto slot = static_cast<std::size_t>(offset / kSamplePeriodSeconds);
      if (filled[slot]) throw CsvError(file, r.line, "duplicate timestamp for participant '" + id + "'");
      filled[slot] = true;
      for (std::size_t c = 0; c < kChannelCount; ++c) rec.channels[c][slot] = r.values[c];
    }
    result.gap_slots += static_cast<std::size_t>(std::count(filled.begin(), filled.end(), false));
    result.records.push_back(std::move(rec));
  }
  return result;
}

void write_actigraphy_csv(const std::vector<ParticipantRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "participant_id,timestamp,activity,light,sleep_wake\n";
  for (const ParticipantRecord& r : records) {
    for (std::size_t i = 0; i < r.length(); ++i) {
      out << r.participant_id << ','
          << format_iso8601(r.start_time + static_cast<std::int64_t>(i) * kSamplePeriodSeconds);
      for (const auto& ch : r.channels) {
        out << ',';
        if (!std::isnan(ch[i])) out << format_double(ch[i]);
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_labels_csv(const std::vector<ParticipantRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "participant_id";
  for (Task t : kAllTasks) out << ',' << task_name(t);
  out << '\n';
  for (const ParticipantRecord& r : records) {
    out << r.participant_id;
    for (int code : r.labels) out << ',' << code;
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace wearssl::data
