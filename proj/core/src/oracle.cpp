#include "annosim/oracle.hpp"

#include <stdexcept>

namespace annosim {

ErrorTarget error_target_from_name(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "most_activated") return ErrorTarget::kMostActivated;
  if (n == "uniform_other") return ErrorTarget::kUniformOther;
  throw ConfigError("unknown error target '" + std::string(name) +
                    "' (expected most_activated or uniform_other)");
}

std::string error_target_name(ErrorTarget t) {
  return t == ErrorTarget::kMostActivated ? "most_activated" : "uniform_other";
}

Oracle::Oracle(const DecayParams& params, int num_classes, std::uint64_t seed,
               ErrorTarget target, ClockKey clock_key)
    : params_(params),
      target_(target),
      clock_key_(clock_key),
      last_seen_(static_cast<std::size_t>(num_classes), 0),
      rng_(seed) {
  if (num_classes < 2) throw std::invalid_argument("need at least two classes");
  validate(params);
}

std::uint64_t Oracle::last_seen(int class_index) const {
  if (class_index < 1 || class_index > num_classes()) {
    throw std::out_of_range("class index out of range");
  }
  return last_seen_[static_cast<std::size_t>(class_index - 1)];
}

void Oracle::set_last_seen(int class_index, std::uint64_t step) {
  if (class_index < 1 || class_index > num_classes()) {
    throw std::out_of_range("class index out of range");
  }
  last_seen_[static_cast<std::size_t>(class_index - 1)] = step;
}

int Oracle::most_activated_other(int exclude) const {
  int best = 0;
  std::uint64_t best_seen = 0;
  for (int c = 1; c <= num_classes(); ++c) {
    if (c == exclude) continue;
    const std::uint64_t seen = last_seen_[static_cast<std::size_t>(c - 1)];
    if (best == 0 || seen > best_seen) {
      best = c;
      best_seen = seen;
    }
  }
  return best;
}

AnnotationResult Oracle::annotate(const StreamInstance& instance) {
  const int truth = instance.true_class;
  if (truth < 1 || truth > num_classes()) {
    throw std::invalid_argument("instance class out of range");
  }

  // The event itself occupies the next step, so a class annotated on the
  // previous event reads an elapsed time of exactly 1 here.
  ++step_count_;
  const std::uint64_t elapsed =
      step_count_ - last_seen_[static_cast<std::size_t>(truth - 1)];
  const double p_err = decaying_score(params_, static_cast<double>(elapsed));

  AnnotationResult result;
  result.instance_id = instance.id;
  result.error_probability_used = p_err;
  result.elapsed_steps = static_cast<double>(elapsed);

  const double u = rng_.next_double();
  if (u < p_err) {
    result.was_error = true;
    if (target_ == ErrorTarget::kMostActivated) {
      result.assigned_label = most_activated_other(truth);
    } else {
      // Uniform over the K-1 other classes.
      std::uint64_t pick = rng_.bounded(static_cast<std::uint64_t>(num_classes() - 1));
      int label = static_cast<int>(pick) + 1;
      if (label >= truth) ++label;
      result.assigned_label = label;
    }
  } else {
    result.was_error = false;
    result.assigned_label = truth;
  }

  const int clock_class =
      clock_key_ == ClockKey::kAssignedLabel ? result.assigned_label : truth;
  last_seen_[static_cast<std::size_t>(clock_class - 1)] = step_count_;
  return result;
}

}  // namespace annosim
