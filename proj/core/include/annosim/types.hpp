#pragma once

#include <string>
#include <vector>

namespace annosim {

/// One annotation class. Indices are 1-based and contiguous.
struct ClassLabel {
  int index = 0;
  std::string name;
};

/// The closed set of classes for a task. Defaults to the four crisis-report
/// categories (c1..c4) used throughout the library.
class LabelSet {
 public:
  LabelSet() : LabelSet(default_names()) {}
  explicit LabelSet(std::vector<std::string> names);

  int size() const { return static_cast<int>(labels_.size()); }

  /// Label for a 1-based class index; throws on out-of-range.
  const ClassLabel& at(int index) const;

  /// Looks up a class by exact name, by "cN" shorthand, or by numeric index.
  /// Returns 0 when unknown.
  int index_of(std::string_view name) const;

  const std::string& name_of(int index) const { return at(index).name; }
  const std::vector<ClassLabel>& labels() const { return labels_; }

  /// Comma-separated class names, for error messages.
  std::string valid_names() const;

  static std::vector<std::string> default_names() {
    return {"infrastructure_and_utility_damage", "rescue_volunteering_donation",
            "affected_individuals", "not_relevant_or_cant_judge"};
  }

 private:
  std::vector<ClassLabel> labels_;
};

/// A single labeled item from the stream.
struct StreamInstance {
  std::string id;
  double arrival_time = 0.0;  // seconds or ordinal step, non-negative
  std::string text;
  int true_class = 0;  // 1-based index into the LabelSet
  double confidence = 1.0;
};

}  // namespace annosim
