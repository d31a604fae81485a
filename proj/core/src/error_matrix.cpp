#include "annosim/error_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "annosim/metrics.hpp"

namespace annosim {

void ErrorMatrix::begin_interval(int interval_index) {
  if (interval_index < current_interval_) {
    throw std::invalid_argument("interval index cannot move backwards");
  }
  current_interval_ = interval_index;
  const int keep_from = current_interval_ - 2;
  std::erase_if(rows_, [keep_from](const ErrorMatrixRow& row) {
    return row.interval_index < keep_from;
  });
}

void ErrorMatrix::add_annotation(const StreamInstance& instance,
                                 int annotated_class,
                                 const OnlineClassifier& model_after_update,
                                 const Featurizer& featurize) {
  if (annotated_class < 1 || annotated_class > k_) {
    throw std::invalid_argument("annotated class out of range");
  }

  ErrorMatrixRow row;
  row.instance_id = instance.id;
  row.arrival_time = instance.arrival_time;
  row.interval_index = current_interval_;
  row.event_index = next_event_++;
  row.annotated_class = annotated_class;
  row.features = featurize(instance.text);
  if (rows_.empty()) {
    row.errors.assign(static_cast<std::size_t>(k_) * k_, 0.0);
  } else {
    row.errors = rows_.back().errors;
  }
  rows_.push_back(std::move(row));

  // Recompute only the annotated class's column from a full prediction pass
  // over the window, annotated labels as truth.
  std::vector<int> truth;
  std::vector<int> predicted;
  truth.reserve(rows_.size());
  predicted.reserve(rows_.size());
  for (const ErrorMatrixRow& r : rows_) {
    truth.push_back(r.annotated_class);
    predicted.push_back(model_after_update.predict(r.features));
  }
  const std::vector<double> f1 = per_class_f1(truth, predicted, k_);
  std::vector<long> support(static_cast<std::size_t>(k_), 0);
  for (int t : truth) ++support[static_cast<std::size_t>(t - 1)];

  const std::size_t col = static_cast<std::size_t>(annotated_class - 1);
  ErrorMatrixRow& added = rows_.back();
  for (int i = 0; i < k_; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    added.errors[idx * k_ + col] =
        support[idx] == 0 ? 0.0 : 1.0 - f1[idx];
  }
}

double ErrorMatrix::error_avoidance_score(int class_index) const {
  if (class_index < 1 || class_index > k_) {
    throw std::invalid_argument("class index out of range");
  }
  const std::size_t col = static_cast<std::size_t>(class_index - 1);
  double sum = 0.0;
  for (const ErrorMatrixRow& row : rows_) {
    for (int i = 0; i < k_; ++i) {
      sum += row.errors[static_cast<std::size_t>(i) * k_ + col];
    }
  }
  return sum;
}

double ErrorMatrix::decay_score(int class_index) const {
  if (class_index < 1 || class_index > k_) {
    throw std::invalid_argument("class index out of range");
  }
  // Two most recent rows of the class, scanning from the back.
  std::uint64_t newest = 0;
  std::uint64_t previous = 0;
  int found = 0;
  for (auto it = rows_.rbegin(); it != rows_.rend() && found < 2; ++it) {
    if (it->annotated_class != class_index) continue;
    if (found == 0) {
      newest = it->event_index;
    } else {
      previous = it->event_index;
    }
    ++found;
  }
  if (found < 2) return 0.0;
  return std::exp(-static_cast<double>(newest - previous));
}

std::optional<int> ErrorMatrix::discarded_class(int current_interval,
                                                int warm_intervals) const {
  if (current_interval <= warm_intervals) return std::nullopt;
  double best = 0.0;
  int best_class = 0;
  bool tied = false;
  for (int c = 1; c <= k_; ++c) {
    const double score = error_avoidance_score(c) * decay_score(c);
    if (best_class == 0 || score > best) {
      best = score;
      best_class = c;
      tied = false;
    } else if (score == best) {
      tied = true;
    }
  }
  if (best_class == 0 || tied || best <= 0.0) return std::nullopt;
  return best_class;
}

std::string ErrorMatrix::to_jsonl(const LabelSet& labels) const {
  std::ostringstream out;
  for (const ErrorMatrixRow& row : rows_) {
    nlohmann::json rec;
    rec["instance_id"] = row.instance_id;
    rec["arrival_time"] = row.arrival_time;
    rec["interval"] = row.interval_index;
    rec["event"] = row.event_index;
    rec["annotated_class"] = labels.name_of(row.annotated_class);
    nlohmann::json grid = nlohmann::json::array();
    for (int i = 0; i < k_; ++i) {
      nlohmann::json line = nlohmann::json::array();
      for (int j = 0; j < k_; ++j) {
        line.push_back(row.errors[static_cast<std::size_t>(i) * k_ + j]);
      }
      grid.push_back(std::move(line));
    }
    rec["errors"] = std::move(grid);
    out << rec.dump() << '\n';
  }
  return out.str();
}

}  // namespace annosim
