#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "annosim/classifier.hpp"
#include "annosim/features.hpp"
#include "annosim/types.hpp"

namespace annosim {

enum class SamplerPolicy { kRandom, kUncertainty, kErrorAvoidance };

SamplerPolicy sampler_policy_from_name(std::string_view name);
std::string sampler_policy_name(SamplerPolicy policy);

/// Inclusive band on the top class probability.
struct UncertaintyBand {
  double low = 0.30;
  double high = 0.70;
};

void validate(const UncertaintyBand& band);

/// True iff max(proba) lies inside the band, bounds included.
bool is_uncertain(const std::vector<double>& proba,
                  const UncertaintyBand& band);

/// Batch members whose predicted top probability falls in the band, in batch
/// order.
std::vector<StreamInstance> sample_uncertainty(
    std::span<const StreamInstance> batch, const OnlineClassifier& model,
    const Featurizer& featurize, const UncertaintyBand& band);

/// Uniform sample without replacement, deterministic per seed, returned in
/// draw order. count larger than the batch is clamped (with a note on
/// stderr). The caller matches count to the uncertainty selection size for
/// budget-matched comparisons.
std::vector<StreamInstance> sample_random(std::span<const StreamInstance> batch,
                                          std::size_t count,
                                          std::uint64_t rng_seed);

/// Uncertainty selection minus instances whose predicted class equals
/// `discarded`; identical to sample_uncertainty when discarded is empty.
std::vector<StreamInstance> sample_error_avoidance(
    std::span<const StreamInstance> batch, const OnlineClassifier& model,
    const Featurizer& featurize, const UncertaintyBand& band,
    std::optional<int> discarded);

}  // namespace annosim
