#include "annosim/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "annosim/util.hpp"

namespace annosim {
namespace {

// Published 20-position class sequences. The target class c3 sits at mixed
// short and long gaps in the slip design and at uniform gaps of 4 in the
// mistake design.
constexpr std::array<int, 20> kSlipSequence = {4, 1, 2, 3, 1, 3, 4, 1, 4, 1,
                                               4, 2, 1, 4, 1, 2, 4, 2, 4, 3};
constexpr std::array<int, 20> kMistakeSequence = {4, 1, 2, 1, 4, 2, 1, 4, 3, 1,
                                                  2, 4, 3, 1, 2, 1, 3, 2, 4, 4};
constexpr int kTargetClass = 3;

AnnotationSchedule build_from_sequence(ScheduleKind kind,
                                       const std::array<int, 20>& sequence,
                                       const ClassPools& pools,
                                       const LabelSet& labels) {
  if (labels.size() < 4) {
    throw std::invalid_argument("schedule needs a label set with 4 classes");
  }
  std::map<int, int> needed;
  for (int c : sequence) ++needed[c];
  for (const auto& [cls, count] : needed) {
    auto it = pools.find(cls);
    const std::size_t have = it == pools.end() ? 0 : it->second.size();
    if (have < static_cast<std::size_t>(count)) {
      throw std::invalid_argument(
          strf("class %s pool has %zu instances, schedule needs %d",
               labels.name_of(cls).c_str(), have, count));
    }
  }

  AnnotationSchedule schedule;
  schedule.kind = kind;
  schedule.target_class = kTargetClass;
  std::map<int, std::size_t> cursor;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const int cls = sequence[i];
    ScheduleEntry entry;
    entry.position = static_cast<int>(i) + 1;
    entry.class_index = cls;
    entry.instance = pools.at(cls)[cursor[cls]++];
    schedule.entries.push_back(std::move(entry));
    if (cls == kTargetClass) {
      schedule.target_positions.push_back(static_cast<int>(i) + 1);
    }
  }
  return schedule;
}

double binomial_pmf(long k, long n, double p) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  const double log_pmf = std::lgamma(static_cast<double>(n) + 1.0) -
                         std::lgamma(static_cast<double>(k) + 1.0) -
                         std::lgamma(static_cast<double>(n - k) + 1.0) +
                         static_cast<double>(k) * std::log(p) +
                         static_cast<double>(n - k) * std::log1p(-p);
  return std::exp(log_pmf);
}

// Two-sided exact test: total probability of outcomes no more likely than
// the observed one under Binomial(n, p0).
double exact_binomial_p(long x, long n, double p0) {
  if (p0 <= 0.0) return x == 0 ? 1.0 : 0.0;
  if (p0 >= 1.0) return x == n ? 1.0 : 0.0;
  const double observed = binomial_pmf(x, n, p0);
  const double slack = observed * 1e-7;
  double total = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double pk = binomial_pmf(k, n, p0);
    if (pk <= observed + slack) total += pk;
  }
  return std::min(total, 1.0);
}

}  // namespace

std::string schedule_kind_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kSlip:
      return "slip";
    case ScheduleKind::kMistake:
      return "mistake";
    case ScheduleKind::kLab:
      return "lab";
  }
  throw std::logic_error("unreachable");
}

ScheduleKind schedule_kind_from_name(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "slip") return ScheduleKind::kSlip;
  if (n == "mistake") return ScheduleKind::kMistake;
  if (n == "lab") return ScheduleKind::kLab;
  throw ConfigError("unknown schedule kind '" + std::string(name) +
                    "' (expected slip, mistake, or lab)");
}

AnnotationSchedule slip_schedule(const ClassPools& pools,
                                 const LabelSet& labels) {
  return build_from_sequence(ScheduleKind::kSlip, kSlipSequence, pools, labels);
}

AnnotationSchedule mistake_schedule(const ClassPools& pools,
                                    const LabelSet& labels) {
  return build_from_sequence(ScheduleKind::kMistake, kMistakeSequence, pools,
                             labels);
}

std::vector<AnnotationSchedule> permute_targets(
    const AnnotationSchedule& schedule,
    const std::vector<StreamInstance>& target_instances) {
  if (target_instances.size() != 3) {
    throw std::invalid_argument("exactly three target instances required");
  }
  if (schedule.target_positions.size() != 3) {
    throw std::invalid_argument("schedule must have exactly three target positions");
  }
  if (target_instances[0].id == target_instances[1].id ||
      target_instances[0].id == target_instances[2].id ||
      target_instances[1].id == target_instances[2].id) {
    throw std::invalid_argument("target instances must be distinct");
  }

  std::array<int, 3> perm = {0, 1, 2};  // lexicographic, identity first
  std::vector<AnnotationSchedule> cases;
  do {
    AnnotationSchedule variant = schedule;
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const int pos = schedule.target_positions[slot];
      variant.entries[static_cast<std::size_t>(pos - 1)].instance =
          target_instances[static_cast<std::size_t>(perm[slot])];
    }
    cases.push_back(std::move(variant));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cases;
}

AnnotationSchedule lab_stream(const std::vector<StreamInstance>& ground_truth,
                              const std::vector<StreamInstance>& noise_pool,
                              std::uint64_t seed, int gap_min, int gap_max,
                              std::size_t max_length) {
  if (ground_truth.empty()) {
    throw std::invalid_argument("ground truth list is empty");
  }
  if (gap_min < 1 || gap_max < gap_min) {
    throw std::invalid_argument("gap range requires 1 <= gap_min <= gap_max");
  }

  Rng rng(seed);
  std::vector<std::size_t> noise_order(noise_pool.size());
  std::iota(noise_order.begin(), noise_order.end(), 0);
  rng.shuffle(noise_order);
  std::size_t noise_cursor = 0;

  AnnotationSchedule schedule;
  schedule.kind = ScheduleKind::kLab;
  auto full = [&]() {
    return max_length > 0 && schedule.entries.size() >= max_length;
  };
  auto append = [&](const StreamInstance& inst) {
    ScheduleEntry entry;
    entry.position = static_cast<int>(schedule.entries.size()) + 1;
    entry.class_index = inst.true_class;
    entry.instance = inst;
    schedule.entries.push_back(std::move(entry));
  };

  for (std::size_t i = 0; i < ground_truth.size() && !full(); ++i) {
    append(ground_truth[i]);
    if (i + 1 == ground_truth.size()) break;
    const int gap =
        gap_min + static_cast<int>(rng.bounded(
                      static_cast<std::uint64_t>(gap_max - gap_min + 1)));
    for (int g = 0; g < gap && !full(); ++g) {
      if (noise_cursor >= noise_order.size()) {
        throw std::invalid_argument(
            strf("noise pool exhausted after %zu draws", noise_cursor));
      }
      append(noise_pool[noise_order[noise_cursor++]]);
    }
  }
  return schedule;
}

std::vector<int> simulate_judge(const AnnotationSchedule& schedule,
                                const DecayParams& params, std::uint64_t seed,
                                ErrorTarget target, ClockKey clock_key) {
  if (schedule.entries.empty()) {
    throw std::invalid_argument("schedule is empty");
  }
  int k = 2;
  for (const ScheduleEntry& entry : schedule.entries) {
    k = std::max(k, entry.class_index);
  }
  Oracle oracle(params, k, seed, target, clock_key);
  std::vector<int> labels;
  labels.reserve(schedule.entries.size());
  for (const ScheduleEntry& entry : schedule.entries) {
    StreamInstance inst = entry.instance;
    inst.true_class = entry.class_index;  // the class the schedule presents
    labels.push_back(oracle.annotate(inst).assigned_label);
  }
  return labels;
}

PositionErrorReport analyze_positions(const AnnotationSchedule& schedule,
                                      const ResponseSet& responses,
                                      SignificanceTest test) {
  if (schedule.target_positions.empty()) {
    throw std::invalid_argument("schedule has no target positions");
  }
  if (responses.labels.empty()) {
    throw std::invalid_argument("no judge responses");
  }
  for (std::size_t j = 0; j < responses.labels.size(); ++j) {
    if (responses.labels[j].size() != schedule.entries.size()) {
      throw std::invalid_argument(
          strf("judge %zu covers %zu positions, schedule has %zu", j,
               responses.labels[j].size(), schedule.entries.size()));
    }
  }

  PositionErrorReport report;
  report.test = test;
  report.positions = schedule.target_positions;
  report.responses_per_position = static_cast<int>(responses.labels.size());
  for (int pos : report.positions) {
    int errors = 0;
    for (const auto& judge : responses.labels) {
      if (judge[static_cast<std::size_t>(pos - 1)] != schedule.target_class) {
        ++errors;
      }
    }
    report.error_counts.push_back(errors);
    report.error_rates.push_back(static_cast<double>(errors) /
                                 static_cast<double>(responses.labels.size()));
  }

  // Last target position against the pooled earlier ones.
  const std::size_t last = report.positions.size() - 1;
  if (last == 0) {
    report.p_value = 1.0;
    return report;
  }
  long x_early = 0;
  for (std::size_t i = 0; i < last; ++i) x_early += report.error_counts[i];
  const long n_early =
      static_cast<long>(last) * report.responses_per_position;
  const long x_last = report.error_counts[last];
  const long n_last = report.responses_per_position;

  if (test == SignificanceTest::kTwoProportionZ) {
    const double p_pool = static_cast<double>(x_early + x_last) /
                          static_cast<double>(n_early + n_last);
    if (p_pool <= 0.0 || p_pool >= 1.0) {
      report.p_value = 1.0;  // degenerate pooled proportion, zero variance
      return report;
    }
    const double p_early = static_cast<double>(x_early) / static_cast<double>(n_early);
    const double p_last = static_cast<double>(x_last) / static_cast<double>(n_last);
    const double se = std::sqrt(p_pool * (1.0 - p_pool) *
                                (1.0 / n_early + 1.0 / n_last));
    const double z = (p_last - p_early) / se;
    report.p_value = 2.0 * (1.0 - normal_cdf(std::abs(z)));
  } else {
    const double p0 = static_cast<double>(x_early) / static_cast<double>(n_early);
    report.p_value = exact_binomial_p(x_last, n_last, p0);
  }
  return report;
}

std::vector<GapAccuracyRow> gap_accuracy_curve(
    const AnnotationSchedule& schedule, const ResponseSet& responses) {
  for (std::size_t j = 0; j < responses.labels.size(); ++j) {
    if (responses.labels[j].size() != schedule.entries.size()) {
      throw std::invalid_argument(
          strf("judge %zu covers %zu positions, schedule has %zu", j,
               responses.labels[j].size(), schedule.entries.size()));
    }
  }

  std::map<std::pair<int, int>, std::pair<long, long>> tally;  // (class, gap)
  std::map<int, int> last_position;
  for (const ScheduleEntry& entry : schedule.entries) {
    auto it = last_position.find(entry.class_index);
    if (it != last_position.end()) {
      const int gap = entry.position - it->second;
      auto& [correct, total] = tally[{entry.class_index, gap}];
      for (const auto& judge : responses.labels) {
        ++total;
        if (judge[static_cast<std::size_t>(entry.position - 1)] ==
            entry.class_index) {
          ++correct;
        }
      }
    }
    last_position[entry.class_index] = entry.position;
  }

  std::vector<GapAccuracyRow> rows;
  for (const auto& [key, counts] : tally) {
    GapAccuracyRow row;
    row.class_index = key.first;
    row.gap_steps = key.second;
    row.correct = counts.first;
    row.total = counts.second;
    rows.push_back(row);
  }
  return rows;
}

std::string schedule_to_json(const AnnotationSchedule& schedule,
                             const LabelSet& labels) {
  nlohmann::json j;
  j["kind"] = schedule_kind_name(schedule.kind);
  j["target_class"] =
      schedule.target_class == 0 ? "" : labels.name_of(schedule.target_class);
  j["target_positions"] = schedule.target_positions;
  nlohmann::json entries = nlohmann::json::array();
  for (const ScheduleEntry& entry : schedule.entries) {
    nlohmann::json e;
    e["position"] = entry.position;
    e["class"] = labels.name_of(entry.class_index);
    e["id"] = entry.instance.id;
    e["text"] = entry.instance.text;
    e["timestamp"] = entry.instance.arrival_time;
    e["confidence"] = entry.instance.confidence;
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j.dump(2);
}

AnnotationSchedule schedule_from_json(const std::string& content,
                                      const LabelSet& labels) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("invalid schedule JSON: ") + e.what());
  }
  AnnotationSchedule schedule;
  schedule.kind = schedule_kind_from_name(j.value("kind", "lab"));
  const std::string target = j.value("target_class", "");
  if (!target.empty()) {
    schedule.target_class = labels.index_of(target);
    if (schedule.target_class == 0) {
      throw std::runtime_error("schedule JSON names unknown target class '" +
                               target + "'");
    }
  }
  if (j.contains("target_positions")) {
    for (const auto& p : j.at("target_positions")) {
      schedule.target_positions.push_back(p.get<int>());
    }
  }
  if (!j.contains("entries")) {
    throw std::runtime_error("schedule JSON has no entries");
  }
  for (const auto& e : j.at("entries")) {
    ScheduleEntry entry;
    entry.position = e.at("position").get<int>();
    const std::string cls = e.at("class").get<std::string>();
    entry.class_index = labels.index_of(cls);
    if (entry.class_index == 0) {
      throw std::runtime_error("schedule JSON names unknown class '" + cls + "'");
    }
    entry.instance.id = e.at("id").get<std::string>();
    entry.instance.text = e.value("text", std::string());
    entry.instance.arrival_time = e.value("timestamp", 0.0);
    entry.instance.confidence = e.value("confidence", 1.0);
    entry.instance.true_class = entry.class_index;
    schedule.entries.push_back(std::move(entry));
  }
  std::sort(schedule.entries.begin(), schedule.entries.end(),
            [](const ScheduleEntry& a, const ScheduleEntry& b) {
              return a.position < b.position;
            });
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    if (schedule.entries[i].position != static_cast<int>(i) + 1) {
      throw std::runtime_error("schedule positions are not contiguous from 1");
    }
  }
  return schedule;
}

AnnotationSchedule schedule_from_json_file(const std::string& path,
                                           const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schedule file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return schedule_from_json(buf.str(), labels);
}

ResponseSet responses_from_csv(const std::string& content,
                               const LabelSet& labels,
                               std::size_t n_positions, char delimiter) {
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  ResponseSet responses;
  std::map<std::string, std::size_t> judge_index;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;  // judge_id, position, label
      continue;
    }
    const std::vector<std::string> fields = split(line, delimiter);
    if (fields.size() < 3) {
      throw std::runtime_error(
          strf("responses line %zu: expected judge_id%cposition%clabel", line_no,
               delimiter, delimiter));
    }
    const std::string judge = trim(fields[0]);
    int position = 0;
    try {
      std::size_t used = 0;
      position = std::stoi(trim(fields[1]), &used);
    } catch (const std::exception&) {
      throw std::runtime_error(
          strf("responses line %zu: bad position '%s'", line_no,
               fields[1].c_str()));
    }
    if (position < 1 || static_cast<std::size_t>(position) > n_positions) {
      throw std::runtime_error(strf("responses line %zu: position %d outside 1..%zu",
                                    line_no, position, n_positions));
    }
    const std::string raw_label = trim(fields[2]);
    const int label = labels.index_of(raw_label);
    if (label == 0) {
      throw std::runtime_error(strf("responses line %zu: unknown label '%s'",
                                    line_no, raw_label.c_str()));
    }

    auto [it, inserted] = judge_index.try_emplace(judge, responses.judge_ids.size());
    if (inserted) {
      responses.judge_ids.push_back(judge);
      responses.labels.emplace_back(n_positions, 0);
    }
    int& slot = responses.labels[it->second][static_cast<std::size_t>(position - 1)];
    if (slot != 0) {
      throw std::runtime_error(strf("responses line %zu: duplicate response for judge %s position %d",
                                    line_no, judge.c_str(), position));
    }
    slot = label;
  }

  for (std::size_t j = 0; j < responses.labels.size(); ++j) {
    for (std::size_t p = 0; p < n_positions; ++p) {
      if (responses.labels[j][p] == 0) {
        throw std::runtime_error(strf("judge %s is missing position %zu",
                                      responses.judge_ids[j].c_str(), p + 1));
      }
    }
  }
  return responses;
}

ResponseSet responses_from_csv_file(const std::string& path,
                                    const LabelSet& labels,
                                    std::size_t n_positions, char delimiter) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open responses file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return responses_from_csv(buf.str(), labels, n_positions, delimiter);
}

std::string responses_to_csv(const ResponseSet& responses,
                             const LabelSet& labels, char delimiter) {
  std::ostringstream out;
  out << "judge_id" << delimiter << "position" << delimiter << "label\n";
  for (std::size_t j = 0; j < responses.judge_ids.size(); ++j) {
    for (std::size_t p = 0; p < responses.labels[j].size(); ++p) {
      out << responses.judge_ids[j] << delimiter << (p + 1) << delimiter
          << labels.name_of(responses.labels[j][p]) << '\n';
    }
  }
  return out.str();
}

}  // namespace annosim
