#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wearssl/data/types.hpp"

namespace wearssl::data {

/// Malformed input; `line()` is 1-based (the header is line 1).
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& file, std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ParseResult {
  std::vector<ParticipantRecord> records;  // sorted by participant id
  std::vector<std::string> warnings;
  std::size_t rows = 0;
  std::size_t reordered_rows = 0;  // rows that arrived before an earlier timestamp
  std::size_t missing_cells = 0;   // empty value cells, stored as NaN
  std::size_t gap_slots = 0;       // grid slots with no row at all, stored as NaN
};

/// Reads the samples CSV
///   participant_id,timestamp,activity,light,sleep_wake
/// (timestamp ISO-8601 UTC, e.g. 2024-01-01T00:00:30Z; empty value cells
/// mean missing) and the labels CSV
///   participant_id,sleep_apnea,diabetes,insomnia,hypertension,metabolic_syndrome
/// with integer class codes (see class_name). Columns are matched by header
/// name. Samples are placed on a 30 s grid anchored at each participant's
/// first timestamp.
ParseResult parse_actigraphy_csv(const std::filesystem::path& samples, const std::filesystem::path& labels);

std::map<std::string, Labels> parse_labels_csv(const std::filesystem::path& labels);

/// Writers for the same schema. Values are printed in shortest round-trip
/// form, so parse(write(records)) reproduces the records exactly.
void write_actigraphy_csv(const std::vector<ParticipantRecord>& records, const std::filesystem::path& samples);
void write_labels_csv(const std::vector<ParticipantRecord>& records, const std::filesystem::path& labels);

std::int64_t parse_iso8601(std::string_view text);  // throws std::invalid_argument
std::string format_iso8601(std::int64_t unix_seconds);

}  // namespace wearssl::data
