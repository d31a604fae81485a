#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "annosim/classifier.hpp"
#include "annosim/features.hpp"
#include "annosim/types.hpp"

namespace annosim {

/// One annotated instance plus the K x K per-class prediction-error grid.
/// grid(i, j) = E(c_i | c_j): the error recorded for class i the last time a
/// row of annotated class j was appended. Only the column of the row's own
/// annotated class changes; every other column is copied from the previous
/// row.
struct ErrorMatrixRow {
  std::string instance_id;
  double arrival_time = 0.0;
  int interval_index = 0;            // 1-based
  std::uint64_t event_index = 0;     // global annotation-event counter
  int annotated_class = 0;           // 1-based
  FeatureVector features;            // kept for the column recompute pass
  std::vector<double> errors;        // K x K, row-major

  double at(int i, int j, int k) const {  // 1-based accessors
    return errors[static_cast<std::size_t>(i - 1) * k + (j - 1)];
  }
};

/// Sliding window of annotated instances covering the current and the two
/// preceding intervals. Single writer within a run.
class ErrorMatrix {
 public:
  explicit ErrorMatrix(int num_classes) : k_(num_classes) {}

  /// Advances the interval clock and prunes rows older than two intervals
  /// before it.
  void begin_interval(int interval_index);

  /// Appends the row for a freshly annotated instance. The annotated class's
  /// column is recomputed by predicting every instance currently in the
  /// window (including this one) with the already-updated model and scoring
  /// per-class F1 with the annotated labels as truth; errors[i][col] becomes
  /// 1 - F1(c_i). Classes with no annotated row keep error 0.
  void add_annotation(const StreamInstance& instance, int annotated_class,
                      const OnlineClassifier& model_after_update,
                      const Featurizer& featurize);

  /// Sum of column c over every row in the window.
  double error_avoidance_score(int class_index) const;

  /// exp(-dT) where dT is the event-index gap between the two most recent
  /// rows of the class; 0 when the class occurs fewer than twice (an
  /// infrequent class is never "too frequent").
  double decay_score(int class_index) const;

  /// Argmax of error_avoidance_score * decay_score. Inactive (nullopt)
  /// through the first `warm_intervals` intervals, on score ties, and when
  /// every score is zero.
  std::optional<int> discarded_class(int current_interval,
                                     int warm_intervals = 3) const;

  const std::vector<ErrorMatrixRow>& rows() const { return rows_; }
  int num_classes() const { return k_; }
  int current_interval() const { return current_interval_; }
  std::uint64_t event_count() const { return next_event_; }

  /// One JSON object per row, for debugging dumps.
  std::string to_jsonl(const LabelSet& labels) const;

 private:
  int k_;
  int current_interval_ = 1;
  std::uint64_t next_event_ = 0;
  std::vector<ErrorMatrixRow> rows_;
};

}  // namespace annosim
