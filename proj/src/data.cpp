#include "esadrnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "esadrnn/calendar.hpp"
#include "esadrnn/errors.hpp"

namespace esadrnn {

namespace {

constexpr char kCsvHeader[] = "timestamp,series_id,load_mw";
constexpr char kCheckpointMagic[8] = {'E', 'S', 'A', 'D', 'R', 'N', 'N', '\n'};
constexpr uint32_t kCheckpointVersion = 1;

void note(IngestReport* report, const std::string& msg) {
  if (report) report->notes.push_back(msg);
}

struct RawSeries {
  std::vector<std::pair<int64_t, double>> rows;  // hour, load
};

// Averages duplicate hours, fills gaps and nonpositive readings by
// linear interpolation, and trims to the first Monday midnight.
LoadSeries consolidate(const std::string& id, RawSeries& raw,
                       IngestReport* report) {
  auto& rows = raw.rows;
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::pair<int64_t, double>> hourly;
  hourly.reserve(rows.size());
  for (size_t i = 0; i < rows.size();) {
    size_t j = i;
    double sum = 0.0;
    while (j < rows.size() && rows[j].first == rows[i].first)
      sum += rows[j++].second;
    if (j - i > 1) {
      if (report) report->duplicates += static_cast<int64_t>(j - i - 1);
      note(report, "series " + id + ": averaged " + std::to_string(j - i) +
                       " rows for " + format_timestamp(rows[i].first));
    }
    hourly.emplace_back(rows[i].first,
                        sum / static_cast<double>(j - i));
    i = j;
  }

  int64_t first = hourly.front().first;
  int64_t last = hourly.back().first;
  int64_t n = last - first + 1;
  std::vector<double> values(n, 0.0);
  std::vector<bool> known(n, false);
  for (auto& [hour, load] : hourly) {
    if (load > 0.0) {
      values[hour - first] = load;
      known[hour - first] = true;
    } else {
      note(report, "series " + id + ": nonpositive reading at " +
                       format_timestamp(hour) + ", interpolating");
    }
  }

  for (int64_t i = 0; i < n;) {
    if (known[i]) {
      ++i;
      continue;
    }
    int64_t j = i;
    while (j < n && !known[j]) ++j;
    int64_t run = j - i;
    if (i == 0 || j == n)
      throw DataError("series " + id + " cannot be repaired at its edge (" +
                      format_timestamp(first + i) + ")");
    if (run > 24)
      throw DataError("series " + id + " has a gap of " + std::to_string(run) +
                      " hours at " + format_timestamp(first + i) +
                      ", more than the repairable 24");
    double a = values[i - 1];
    double b = values[j];
    for (int64_t k = 0; k < run; ++k)
      values[i + k] = a + (b - a) * static_cast<double>(k + 1) /
                              static_cast<double>(run + 1);
    if (report) report->interpolated += run;
    note(report, "series " + id + ": filled " + std::to_string(run) +
                     " hours from " + format_timestamp(first + i));
    i = j;
  }

  int64_t aligned = first;
  while (weekday_index(aligned) != 0 || hour_of_day(aligned) != 0) ++aligned;
  int64_t drop = aligned - first;
  if (drop >= n)
    throw DataError("series " + id +
                    " ends before its first Monday midnight");
  if (drop > 0) {
    if (report) report->trimmed += drop;
    note(report, "series " + id + ": dropped " + std::to_string(drop) +
                     " leading hours to start Monday 00:00");
  }

  LoadSeries s;
  s.id = id;
  s.start_hour = aligned;
  s.values.assign(values.begin() + drop, values.end());
  return s;
}

}  // namespace

std::vector<LoadSeries> parse_csv_text(const std::string& text,
                                       IngestReport* report) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty load file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw DataError("load file must start with `" + std::string(kCsvHeader) +
                    "`, got `" + line + "`");

  std::map<std::string, RawSeries> by_id;
  int64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string stamp, id, load_text;
    if (!std::getline(row, stamp, ',') || !std::getline(row, id, ',') ||
        !std::getline(row, load_text) ||
        id.empty() || load_text.empty())
      throw DataError("line " + std::to_string(lineno) +
                      ": expected `timestamp,series_id,load_mw`");
    int64_t hour;
    try {
      hour = parse_timestamp(stamp);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
    double load;
    size_t used = 0;
    try {
      load = std::stod(load_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != load_text.size() || !std::isfinite(load))
      throw DataError("line " + std::to_string(lineno) +
                      ": unparseable load `" + load_text + "`");
    by_id[id].rows.emplace_back(hour, load);
    if (report) ++report->rows;
  }
  if (by_id.empty()) throw DataError("load file holds no data rows");

  std::vector<LoadSeries> out;
  out.reserve(by_id.size());
  for (auto& [id, raw] : by_id) out.push_back(consolidate(id, raw, report));
  return out;
}

std::vector<LoadSeries> load_csv(const std::string& path,
                                 IngestReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_text(buf.str(), report);
}

void write_csv(const std::string& path,
               const std::vector<LoadSeries>& series) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << kCsvHeader << "\n";
  char buf[128];
  for (const LoadSeries& s : series) {
    for (int64_t t = 0; t < s.hours(); ++t) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g\n",
                    format_timestamp(s.start_hour + t).c_str(), s.id.c_str(),
                    s.values[t]);
      out << buf;
    }
  }
  if (!out) throw DataError("failed while writing " + path);
}

namespace {

void put_u32(std::ostream& out, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.write(b, 4);
}

void put_u64(std::ostream& out, uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.write(b, 8);
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void need(std::istream& in, char* dst, size_t n, const std::string& path) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n)
    throw CheckpointTruncatedError(path + " ends mid-record");
}

uint32_t get_u32(std::istream& in, const std::string& path) {
  char b[4];
  need(in, b, 4, path);
  uint32_t v;
  std::memcpy(&v, b, 4);
  return v;
}

uint64_t get_u64(std::istream& in, const std::string& path) {
  char b[8];
  need(in, b, 8, path);
  uint64_t v;
  std::memcpy(&v, b, 8);
  return v;
}

std::string get_string(std::istream& in, const std::string& path,
                       uint32_t max_len) {
  uint32_t len = get_u32(in, path);
  if (len > max_len)
    throw CheckpointTruncatedError(path + " declares an implausible length");
  std::string s(len, '\0');
  if (len > 0) need(in, s.data(), len, path);
  return s;
}

void get_doubles(std::istream& in, std::vector<double>& v,
                 const std::string& path) {
  if (v.empty()) return;
  need(in, reinterpret_cast<char*>(v.data()), v.size() * sizeof(double),
       path);
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u64(out, meta.seed);
  put_u32(out, static_cast<uint32_t>(meta.config_text.size()));
  out.write(meta.config_text.data(),
            static_cast<std::streamsize>(meta.config_text.size()));
  put_u64(out, meta.loss_trace.size());
  put_doubles(out, meta.loss_trace);
  put_u32(out, static_cast<uint32_t>(store.count()));
  for (size_t i = 0; i < store.count(); ++i) {
    const Parameter& p = store[i];
    put_u32(out, static_cast<uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(out, static_cast<uint32_t>(p.shape.size()));
    for (int d : p.shape) put_u32(out, static_cast<uint32_t>(d));
    put_doubles(out, p.value);
    put_doubles(out, p.m);
    put_doubles(out, p.v);
  }
  if (!out) throw DataError("failed while writing " + path);
}

CheckpointMeta load_checkpoint(const std::string& path, ParamStore& store) {
  if (store.count() != 0)
    throw CheckpointError("checkpoints must load into an empty store");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);

  char magic[sizeof(kCheckpointMagic)];
  need(in, magic, sizeof(magic), path);
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw CheckpointError(path + " is not a model checkpoint");
  uint32_t version = get_u32(in, path);
  if (version != kCheckpointVersion)
    throw CheckpointVersionError(path + " has version " +
                                 std::to_string(version) + ", expected " +
                                 std::to_string(kCheckpointVersion));

  CheckpointMeta meta;
  meta.version = version;
  meta.seed = get_u64(in, path);
  meta.config_text = get_string(in, path, 1u << 20);
  uint64_t trace_len = get_u64(in, path);
  if (trace_len > (1ull << 32))
    throw CheckpointTruncatedError(path + " declares an implausible length");
  meta.loss_trace.resize(trace_len);
  get_doubles(in, meta.loss_trace, path);

  uint32_t count = get_u32(in, path);
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = get_string(in, path, 1u << 16);
    if (name.empty())
      throw CheckpointShapeError(path + " holds a nameless parameter");
    uint32_t ndims = get_u32(in, path);
    if (ndims == 0 || ndims > 4)
      throw CheckpointShapeError(path + ": parameter " + name + " has " +
                                 std::to_string(ndims) + " dimensions");
    Shape shape(ndims);
    int64_t numel = 1;
    for (uint32_t d = 0; d < ndims; ++d) {
      uint32_t v = get_u32(in, path);
      if (v == 0 || v > (1u << 24))
        throw CheckpointShapeError(path + ": parameter " + name +
                                   " has an invalid extent");
      shape[d] = static_cast<int>(v);
      numel *= v;
    }
    if (numel > (1 << 28))
      throw CheckpointShapeError(path + ": parameter " + name +
                                 " is implausibly large");
    Parameter& p = store.create(name, shape);
    get_doubles(in, p.value, path);
    get_doubles(in, p.m, path);
    get_doubles(in, p.v, path);
  }
  char extra;
  if (in.read(&extra, 1), in.gcount() != 0)
    throw CheckpointError(path + " has trailing bytes after the last record");
  return meta;
}

}  // namespace esadrnn
