#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "annosim/decay.hpp"
#include "annosim/oracle.hpp"
#include "annosim/types.hpp"

namespace annosim {

enum class ScheduleKind { kSlip, kMistake, kLab };

std::string schedule_kind_name(ScheduleKind kind);
ScheduleKind schedule_kind_from_name(std::string_view name);

struct ScheduleEntry {
  int position = 0;  // 1-based, contiguous
  int class_index = 0;
  StreamInstance instance;
};

/// An ordered presentation of instances to an annotator. For the slip and
/// mistake kinds, target_positions are exactly the positions holding the
/// target class.
struct AnnotationSchedule {
  ScheduleKind kind = ScheduleKind::kLab;
  int target_class = 0;  // 0 = none (lab streams)
  std::vector<int> target_positions;
  std::vector<ScheduleEntry> entries;

  std::size_t size() const { return entries.size(); }
};

/// Per-class instance pools the schedule generators draw from, indexed by
/// 1-based class.
using ClassPools = std::map<int, std::vector<StreamInstance>>;

/// The published 20-instance sequence with the target class at mixed short
/// and long gaps (positions 4, 6, 20). Requires a 4-class label set.
AnnotationSchedule slip_schedule(const ClassPools& pools,
                                 const LabelSet& labels);

/// The published 20-instance sequence with the target class at uniform gaps
/// (positions 9, 13, 17).
AnnotationSchedule mistake_schedule(const ClassPools& pools,
                                    const LabelSet& labels);

/// All 3! assignments of three distinct target instances to the schedule's
/// target positions; non-target positions are left untouched. The identity
/// assignment comes first.
std::vector<AnnotationSchedule> permute_targets(
    const AnnotationSchedule& schedule,
    const std::vector<StreamInstance>& target_instances);

/// Interleaves 1..4 randomly picked noise instances (drawn from noise_pool
/// without replacement) between consecutive ground-truth instances.
/// max_length 0 means unbounded; otherwise the stream is cut at that many
/// positions. Deterministic per seed.
AnnotationSchedule lab_stream(const std::vector<StreamInstance>& ground_truth,
                              const std::vector<StreamInstance>& noise_pool,
                              std::uint64_t seed, int gap_min = 1,
                              int gap_max = 4, std::size_t max_length = 0);

/// Per-judge label assignments aligned to a schedule.
struct ResponseSet {
  std::vector<std::string> judge_ids;
  std::vector<std::vector<int>> labels;  // judge x position, 1-based classes
};

/// Runs a decay oracle over the schedule in order, producing one judge's
/// responses. Closes the loop between the decay model and the gap analysis.
std::vector<int> simulate_judge(const AnnotationSchedule& schedule,
                                const DecayParams& params, std::uint64_t seed,
                                ErrorTarget target = ErrorTarget::kMostActivated,
                                ClockKey clock_key = ClockKey::kAssignedLabel);

enum class SignificanceTest { kTwoProportionZ, kExactBinomial };

struct PositionErrorReport {
  std::vector<int> positions;          // the schedule's target positions
  std::vector<double> error_rates;     // micro-average per position
  std::vector<int> error_counts;
  int responses_per_position = 0;
  double p_value = 1.0;  // last target position vs pooled earlier ones
  SignificanceTest test = SignificanceTest::kTwoProportionZ;
};

/// Per-target-position micro-average error rates plus a two-sided
/// significance test of the last target position against the pooled earlier
/// ones. Responses must cover every schedule position.
PositionErrorReport analyze_positions(
    const AnnotationSchedule& schedule, const ResponseSet& responses,
    SignificanceTest test = SignificanceTest::kTwoProportionZ);

struct GapAccuracyRow {
  int class_index = 0;
  int gap_steps = 0;
  long correct = 0;
  long total = 0;
};

/// For each ground-truth instance with a same-class predecessor in the
/// stream, tallies correct responses by the step gap to that predecessor.
/// Rows are sorted by (class, gap); classes with no repeat occurrence emit
/// nothing.
std::vector<GapAccuracyRow> gap_accuracy_curve(
    const AnnotationSchedule& schedule, const ResponseSet& responses);

// ---- serialization ----

/// Schedule as JSON (kind, target class/positions, and position, class name,
/// instance id, text per entry) for upload to crowdsourcing tools.
std::string schedule_to_json(const AnnotationSchedule& schedule,
                             const LabelSet& labels);
AnnotationSchedule schedule_from_json(const std::string& content,
                                      const LabelSet& labels);
AnnotationSchedule schedule_from_json_file(const std::string& path,
                                           const LabelSet& labels);

/// Responses as delimiter-separated (judge_id, position, label) with a
/// header row; labels by name, "cN" shorthand, or index.
ResponseSet responses_from_csv(const std::string& content,
                               const LabelSet& labels,
                               std::size_t n_positions, char delimiter = ',');
ResponseSet responses_from_csv_file(const std::string& path,
                                    const LabelSet& labels,
                                    std::size_t n_positions,
                                    char delimiter = ',');
std::string responses_to_csv(const ResponseSet& responses,
                             const LabelSet& labels, char delimiter = ',');

}  // namespace annosim
