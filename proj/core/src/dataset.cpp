#include "annosim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "annosim/util.hpp"

namespace annosim {
namespace {

using nlohmann::json;

bool has_extension(const std::string& path, const char* ext) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return false;
  return lowercase(path.substr(dot + 1)) == ext;
}

IngestFormat resolve_format(const IngestOptions& options,
                            const std::string& path_hint,
                            const std::string& content) {
  if (options.format != IngestFormat::kAuto) return options.format;
  if (has_extension(path_hint, "jsonl") || has_extension(path_hint, "json") ||
      has_extension(path_hint, "ndjson")) {
    return IngestFormat::kJsonLines;
  }
  if (has_extension(path_hint, "csv") || has_extension(path_hint, "tsv") ||
      has_extension(path_hint, "dsv") || has_extension(path_hint, "txt")) {
    return IngestFormat::kDelimited;
  }
  // No recognizable extension: sniff the first non-space byte.
  for (char c : content) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? IngestFormat::kJsonLines : IngestFormat::kDelimited;
  }
  return IngestFormat::kDelimited;
}

[[noreturn]] void row_error(const std::string& origin, std::size_t line,
                            const std::string& what) {
  throw std::runtime_error(strf("%s line %zu: %s", origin.c_str(), line, what.c_str()));
}

double parse_number(const std::string& origin, std::size_t line,
                    const std::string& field, const std::string& raw) {
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    row_error(origin, line, strf("field '%s' is not a number: '%s'",
                                 field.c_str(), raw.c_str()));
  }
}

void validate_instance(const std::string& origin, std::size_t line,
                       const StreamInstance& inst) {
  if (inst.arrival_time < 0.0) {
    row_error(origin, line, "timestamp must be non-negative");
  }
  if (inst.confidence < 0.0 || inst.confidence > 1.0) {
    row_error(origin, line, strf("confidence %s outside [0, 1]",
                                 format_double(inst.confidence).c_str()));
  }
}

int map_label(const std::string& origin, std::size_t line,
              const LabelSet& labels, const std::string& raw) {
  const int idx = labels.index_of(raw);
  if (idx == 0) {
    row_error(origin, line, strf("unknown label '%s' (expected one of %s)",
                                 raw.c_str(), labels.valid_names().c_str()));
  }
  return idx;
}

std::string json_field_as_string(const std::string& origin, std::size_t line,
                                 const json& rec, const std::string& key) {
  if (!rec.contains(key)) {
    row_error(origin, line, strf("missing field '%s'", key.c_str()));
  }
  const json& v = rec.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  row_error(origin, line, strf("field '%s' must be a string or number", key.c_str()));
}

double json_field_as_number(const std::string& origin, std::size_t line,
                            const json& rec, const std::string& key) {
  if (!rec.contains(key)) {
    row_error(origin, line, strf("missing field '%s'", key.c_str()));
  }
  const json& v = rec.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_number(origin, line, key, v.get<std::string>());
  row_error(origin, line, strf("field '%s' must be a number", key.c_str()));
}

std::vector<StreamInstance> ingest_jsonl(const std::string& content,
                                         const LabelSet& labels,
                                         const IngestOptions& options,
                                         const std::string& origin) {
  std::vector<StreamInstance> out;
  std::set<std::string> seen_ids;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      row_error(origin, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) row_error(origin, line_no, "record is not an object");

    StreamInstance inst;
    inst.id = json_field_as_string(origin, line_no, rec, options.schema.id);
    inst.arrival_time =
        json_field_as_number(origin, line_no, rec, options.schema.timestamp);
    inst.text = json_field_as_string(origin, line_no, rec, options.schema.text);
    const std::string raw_label =
        json_field_as_string(origin, line_no, rec, options.schema.label);
    inst.true_class = map_label(origin, line_no, labels, raw_label);
    inst.confidence =
        rec.contains(options.schema.confidence)
            ? json_field_as_number(origin, line_no, rec, options.schema.confidence)
            : 1.0;
    validate_instance(origin, line_no, inst);
    if (!seen_ids.insert(inst.id).second) {
      row_error(origin, line_no, strf("duplicate id '%s'", inst.id.c_str()));
    }
    if (inst.confidence > options.min_confidence) out.push_back(std::move(inst));
  }
  return out;
}

struct DelimitedRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // line the record started on
};

// RFC4180-style records: quoted fields may hold the delimiter, doubled quotes,
// and newlines.
std::vector<DelimitedRecord> parse_delimited(const std::string& content,
                                             char delimiter,
                                             const std::string& origin) {
  std::vector<DelimitedRecord> records;
  DelimitedRecord current;
  current.line = 1;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line_no = 1;

  auto end_field = [&]() {
    current.fields.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&]() {
    end_field();
    const bool blank = current.fields.size() == 1 && trim(current.fields[0]).empty();
    if (!blank) records.push_back(std::move(current));
    current = DelimitedRecord{};
    current.line = line_no;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\n') {
      ++line_no;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) {
    throw std::runtime_error(strf("%s line %zu: unterminated quoted field",
                                  origin.c_str(), current.line));
  }
  if (!field.empty() || !current.fields.empty()) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_record();
  }
  return records;
}

std::vector<StreamInstance> ingest_delimited(const std::string& content,
                                             const LabelSet& labels,
                                             const IngestOptions& options,
                                             const std::string& origin) {
  const auto records = parse_delimited(content, options.delimiter, origin);
  if (records.empty()) {
    throw std::runtime_error(origin + ": no header row");
  }
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < records[0].fields.size(); ++i) {
    columns[trim(records[0].fields[i])] = i;
  }
  auto column_of = [&](const std::string& name, bool required) -> long {
    auto it = columns.find(name);
    if (it == columns.end()) {
      if (required) {
        throw std::runtime_error(strf("%s: header is missing column '%s'",
                                      origin.c_str(), name.c_str()));
      }
      return -1;
    }
    return static_cast<long>(it->second);
  };
  const long col_id = column_of(options.schema.id, true);
  const long col_ts = column_of(options.schema.timestamp, true);
  const long col_text = column_of(options.schema.text, true);
  const long col_label = column_of(options.schema.label, true);
  const long col_conf = column_of(options.schema.confidence, false);

  auto cell = [&](const DelimitedRecord& rec, long col) -> std::string {
    if (col < 0 || static_cast<std::size_t>(col) >= rec.fields.size()) return "";
    return rec.fields[static_cast<std::size_t>(col)];
  };
  auto required_cell = [&](const DelimitedRecord& rec, long col,
                           const std::string& name) -> std::string {
    const std::string v = cell(rec, col);
    if (trim(v).empty()) {
      row_error(origin, rec.line, strf("missing field '%s'", name.c_str()));
    }
    return v;
  };

  std::vector<StreamInstance> out;
  std::set<std::string> seen_ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const DelimitedRecord& rec = records[r];
    StreamInstance inst;
    inst.id = required_cell(rec, col_id, options.schema.id);
    inst.arrival_time = parse_number(origin, rec.line, options.schema.timestamp,
                                     required_cell(rec, col_ts, options.schema.timestamp));
    inst.text = cell(rec, col_text);
    if (static_cast<std::size_t>(col_text) >= rec.fields.size()) {
      row_error(origin, rec.line, strf("missing field '%s'", options.schema.text.c_str()));
    }
    inst.true_class = map_label(origin, rec.line, labels,
                                required_cell(rec, col_label, options.schema.label));
    const std::string conf_raw = cell(rec, col_conf);
    inst.confidence = trim(conf_raw).empty()
                          ? 1.0
                          : parse_number(origin, rec.line,
                                         options.schema.confidence, conf_raw);
    validate_instance(origin, rec.line, inst);
    if (!seen_ids.insert(inst.id).second) {
      row_error(origin, rec.line, strf("duplicate id '%s'", inst.id.c_str()));
    }
    if (inst.confidence > options.min_confidence) out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

std::vector<StreamInstance> ingest_text(const std::string& content,
                                        const LabelSet& labels,
                                        const IngestOptions& options,
                                        const std::string& origin) {
  const IngestFormat format = resolve_format(options, origin, content);
  if (format == IngestFormat::kJsonLines) {
    return ingest_jsonl(content, labels, options, origin);
  }
  return ingest_delimited(content, labels, options, origin);
}

std::vector<StreamInstance> ingest(const std::string& path,
                                   const LabelSet& labels,
                                   const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ingest_text(buf.str(), labels, options, path);
}

int DatasetSplits::bin_count() const {
  if (stream.empty()) return 0;
  return static_cast<int>((stream.size() + bin_size - 1) /
                          static_cast<std::size_t>(bin_size));
}

std::span<const StreamInstance> DatasetSplits::bin(int i) const {
  if (i < 0 || i >= bin_count()) {
    throw std::out_of_range(strf("bin index %d out of range [0, %d)", i, bin_count()));
  }
  const std::size_t begin = static_cast<std::size_t>(i) * bin_size;
  const std::size_t end = std::min(stream.size(), begin + bin_size);
  return {stream.data() + begin, end - begin};
}

DatasetSplits prepare_splits(const std::vector<StreamInstance>& data,
                             const LabelSet& labels,
                             const SplitOptions& options) {
  if (data.empty()) throw std::invalid_argument("dataset is empty");
  if (options.bin_size < 1) throw std::invalid_argument("bin_size must be >= 1");
  if (options.n_warmup < 0) throw std::invalid_argument("n_warmup must be >= 0");
  if (options.test_fraction < 0.0 || options.test_fraction >= 1.0) {
    throw std::invalid_argument("test_fraction must be in [0, 1)");
  }

  Rng rng(options.seed);
  const std::size_t n = data.size();
  std::vector<char> in_test(n, 0);

  if (options.stratify_test) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[data[i].true_class].push_back(i);
    for (auto& [cls, idx] : by_class) {
      rng.shuffle(idx);
      const std::size_t want = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::floor(static_cast<double>(idx.size()) * options.test_fraction)));
      for (std::size_t j = 0; j < want && j < idx.size(); ++j) in_test[idx[j]] = 1;
    }
  } else {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng.shuffle(idx);
    const std::size_t want = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::floor(static_cast<double>(n) * options.test_fraction)));
    for (std::size_t j = 0; j < want && j < n; ++j) in_test[idx[j]] = 1;
  }

  // Warm-up: n_warmup random picks per class from the non-test remainder.
  std::map<int, std::vector<std::size_t>> rest_by_class;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_test[i]) rest_by_class[data[i].true_class].push_back(i);
  }
  std::vector<char> in_warmup(n, 0);
  for (int c = 1; c <= labels.size(); ++c) {
    auto& idx = rest_by_class[c];
    if (static_cast<int>(idx.size()) < options.n_warmup) {
      throw std::invalid_argument(
          strf("class %s has %zu non-test instances, need %d for warm-up",
               labels.name_of(c).c_str(), idx.size(), options.n_warmup));
    }
    rng.shuffle(idx);
    for (int j = 0; j < options.n_warmup; ++j) in_warmup[idx[static_cast<std::size_t>(j)]] = 1;
  }

  DatasetSplits splits;
  splits.bin_size = options.bin_size;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_test[i]) {
      splits.test.push_back(data[i]);
    } else if (in_warmup[i]) {
      splits.warmup.push_back(data[i]);
    } else {
      splits.stream.push_back(data[i]);
    }
  }
  std::sort(splits.stream.begin(), splits.stream.end(),
            [](const StreamInstance& a, const StreamInstance& b) {
              if (a.arrival_time != b.arrival_time) {
                return a.arrival_time < b.arrival_time;
              }
              return a.id < b.id;
            });
  return splits;
}

std::uint64_t dataset_fingerprint(const std::vector<StreamInstance>& data) {
  std::uint64_t h = 0;
  for (const auto& inst : data) {
    h = fnv1a64(inst.id, h);
    h = fnv1a64(format_double(inst.arrival_time), h);
    h = fnv1a64(std::to_string(inst.true_class), h);
    h = fnv1a64(format_double(inst.confidence), h);
    h = fnv1a64(inst.text, h);
  }
  return h;
}

}  // namespace annosim
