#pragma once

#include <string>
#include <string_view>

namespace annosim {

/// Parameters of the sigmoid memory-decay model:
/// score(t) = gamma / (1 + exp(-alpha * t + beta)).
struct DecayParams {
  double alpha = 0.0;  // decay rate per annotation step, >= 0
  double beta = 0.0;   // sigmoid offset
  double gamma = 0.0;  // asymptotic error ceiling, in [0, 1]
};

enum class DecayPreset { kSlow, kFast, kNone };

/// Published constants for the named presets. kNone has gamma = 0, so the
/// score is identically zero and all call sites stay uniform.
DecayParams decay_preset(DecayPreset preset);

/// Parses "slow" / "fast" / "none"; throws ConfigError otherwise.
DecayPreset decay_preset_from_name(std::string_view name);
std::string decay_preset_name(DecayPreset preset);

/// Probability of an annotation error after t elapsed steps without seeing
/// the class. Non-decreasing in t, bounded by gamma. Throws on t < 0.
double decaying_score(const DecayParams& params, double t);

void validate(const DecayParams& params);

}  // namespace annosim
