#include "annosim/decay.hpp"

#include <cmath>
#include <stdexcept>

#include "annosim/util.hpp"

namespace annosim {

DecayParams decay_preset(DecayPreset preset) {
  switch (preset) {
    case DecayPreset::kSlow:
      return {0.0434, 0.9025, 0.75};
    case DecayPreset::kFast:
      return {0.03, 1.00, 1.00};
    case DecayPreset::kNone:
      return {0.0, 0.0, 0.0};
  }
  throw std::logic_error("unreachable");
}

DecayPreset decay_preset_from_name(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "slow") return DecayPreset::kSlow;
  if (n == "fast") return DecayPreset::kFast;
  if (n == "none") return DecayPreset::kNone;
  throw ConfigError("unknown decay preset '" + std::string(name) +
                    "' (expected slow, fast, or none)");
}

std::string decay_preset_name(DecayPreset preset) {
  switch (preset) {
    case DecayPreset::kSlow:
      return "slow";
    case DecayPreset::kFast:
      return "fast";
    case DecayPreset::kNone:
      return "none";
  }
  throw std::logic_error("unreachable");
}

void validate(const DecayParams& params) {
  if (params.alpha < 0.0) {
    throw std::invalid_argument("decay alpha must be >= 0");
  }
  if (params.gamma < 0.0 || params.gamma > 1.0) {
    throw std::invalid_argument("decay gamma must be in [0, 1]");
  }
  if (!std::isfinite(params.alpha) || !std::isfinite(params.beta) ||
      !std::isfinite(params.gamma)) {
    throw std::invalid_argument("decay parameters must be finite");
  }
}

double decaying_score(const DecayParams& params, double t) {
  if (t < 0.0) {
    throw std::invalid_argument("elapsed time cannot be negative");
  }
  if (params.gamma == 0.0) return 0.0;
  return params.gamma / (1.0 + std::exp(-params.alpha * t + params.beta));
}

}  // namespace annosim
