#pragma once

// Ingestion of hourly load data from long-format CSV, and binary
// checkpoints that round-trip a trained model bit for bit.

#include <cstdint>
#include <string>
#include <vector>

#include "esadrnn/params.hpp"

namespace esadrnn {

struct LoadSeries {
  std::string id;
  int64_t start_hour = 0;  // absolute hour of values[0]
  std::vector<double> values;

  int64_t hours() const { return static_cast<int64_t>(values.size()); }
};

// What ingestion did to the raw rows, for honest reporting.
struct IngestReport {
  int64_t rows = 0;
  int64_t duplicates = 0;     // extra rows averaged into their hour
  int64_t interpolated = 0;   // hours filled linearly (gaps and nonpositives)
  int64_t trimmed = 0;        // leading hours dropped for Monday alignment
  std::vector<std::string> notes;
};

// Expects a header line `timestamp,series_id,load_mw`. Rows may arrive
// in any order. Duplicate hours are averaged, gaps of up to 24 hours
// and nonpositive readings are filled by linear interpolation (noted in
// the report), longer gaps are an error. Each series is trimmed to
// start at its first Monday 00:00. Series come back sorted by id.
std::vector<LoadSeries> parse_csv_text(const std::string& text,
                                       IngestReport* report = nullptr);
std::vector<LoadSeries> load_csv(const std::string& path,
                                 IngestReport* report = nullptr);
void write_csv(const std::string& path,
               const std::vector<LoadSeries>& series);

struct CheckpointMeta {
  uint32_t version = 1;
  std::string config_text;
  uint64_t seed = 0;
  std::vector<double> loss_trace;
};

// Binary layout: magic, version, then the metadata, then every
// parameter in store order as name, shape and raw little-endian
// doubles. Values and Adam moments round-trip exactly.
void save_checkpoint(const std::string& path, const ParamStore& store,
                     const CheckpointMeta& meta);

// Fills an empty store with the parameters found in the file. Version
// mismatches, truncation and malformed shapes raise distinct errors.
CheckpointMeta load_checkpoint(const std::string& path, ParamStore& store);

}  // namespace esadrnn
