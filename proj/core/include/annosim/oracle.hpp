#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "annosim/decay.hpp"
#include "annosim/types.hpp"
#include "annosim/util.hpp"

namespace annosim {

/// Which incorrect label an erring oracle picks.
enum class ErrorTarget {
  kMostActivated,  // the most recently assigned other class
  kUniformOther,   // uniform over the other classes
};

/// Which class's clock an annotation refreshes. Assigned-label clocks model
/// the annotator reinforcing whatever concept they believe they just saw;
/// true-label clocks are the sensitivity-study alternative.
enum class ClockKey { kAssignedLabel, kTrueLabel };

ErrorTarget error_target_from_name(std::string_view name);
std::string error_target_name(ErrorTarget t);

struct AnnotationResult {
  std::string instance_id;
  int assigned_label = 0;
  bool was_error = false;
  double error_probability_used = 0.0;
  double elapsed_steps = 0.0;  // clock reading fed to the decay model
};

/// Simulated human annotator with per-class memory-decay error injection.
/// Single writer; one oracle per simulation run.
class Oracle {
 public:
  Oracle(const DecayParams& params, int num_classes, std::uint64_t seed,
         ErrorTarget target = ErrorTarget::kMostActivated,
         ClockKey clock_key = ClockKey::kAssignedLabel);

  /// Labels one instance. The elapsed time for the instance's true class is
  /// the number of annotation events since that class was last assigned
  /// (consecutive events of one class give t = 1); the error probability is
  /// decaying_score at that elapsed time. Then the event counter advances and
  /// the clock for the assigned (or true, per ClockKey) label is refreshed.
  AnnotationResult annotate(const StreamInstance& instance);

  /// The class != exclude whose clock was refreshed most recently; ties go to
  /// the lowest class index.
  int most_activated_other(int exclude) const;

  int num_classes() const { return static_cast<int>(last_seen_.size()); }
  std::uint64_t step_count() const { return step_count_; }
  std::uint64_t last_seen(int class_index) const;

  // Test hooks: pin the clocks to force a chosen elapsed time.
  void set_step_count(std::uint64_t steps) { step_count_ = steps; }
  void set_last_seen(int class_index, std::uint64_t step);

 private:
  DecayParams params_;
  ErrorTarget target_;
  ClockKey clock_key_;
  std::uint64_t step_count_ = 0;            // annotation events so far
  std::vector<std::uint64_t> last_seen_;    // per class, step of last refresh
  Rng rng_;
};

}  // namespace annosim
