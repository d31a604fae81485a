#include "annosim/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "annosim/util.hpp"

namespace annosim {

SamplerPolicy sampler_policy_from_name(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "random") return SamplerPolicy::kRandom;
  if (n == "uncertainty") return SamplerPolicy::kUncertainty;
  if (n == "error_avoidance") return SamplerPolicy::kErrorAvoidance;
  throw ConfigError("unknown sampler policy '" + std::string(name) +
                    "' (expected random, uncertainty, or error_avoidance)");
}

std::string sampler_policy_name(SamplerPolicy policy) {
  switch (policy) {
    case SamplerPolicy::kRandom:
      return "random";
    case SamplerPolicy::kUncertainty:
      return "uncertainty";
    case SamplerPolicy::kErrorAvoidance:
      return "error_avoidance";
  }
  throw std::logic_error("unreachable");
}

void validate(const UncertaintyBand& band) {
  if (!(band.low >= 0.0 && band.low < band.high && band.high <= 1.0)) {
    throw ConfigError("uncertainty band requires 0 <= low < high <= 1");
  }
}

bool is_uncertain(const std::vector<double>& proba,
                  const UncertaintyBand& band) {
  if (proba.empty()) throw std::invalid_argument("empty probability vector");
  const double top = *std::max_element(proba.begin(), proba.end());
  return top >= band.low && top <= band.high;
}

std::vector<StreamInstance> sample_uncertainty(
    std::span<const StreamInstance> batch, const OnlineClassifier& model,
    const Featurizer& featurize, const UncertaintyBand& band) {
  validate(band);
  std::vector<StreamInstance> selected;
  for (const StreamInstance& inst : batch) {
    if (is_uncertain(model.predict_proba(featurize(inst.text)), band)) {
      selected.push_back(inst);
    }
  }
  return selected;
}

std::vector<StreamInstance> sample_random(std::span<const StreamInstance> batch,
                                          std::size_t count,
                                          std::uint64_t rng_seed) {
  if (count > batch.size()) {
    std::fprintf(stderr,
                 "note: random sample count %zu clamped to batch size %zu\n",
                 count, batch.size());
    count = batch.size();
  }
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(rng_seed);
  rng.shuffle(idx);
  std::vector<StreamInstance> selected;
  selected.reserve(count);
  for (std::size_t i = 0; i < count; ++i) selected.push_back(batch[idx[i]]);
  return selected;
}

std::vector<StreamInstance> sample_error_avoidance(
    std::span<const StreamInstance> batch, const OnlineClassifier& model,
    const Featurizer& featurize, const UncertaintyBand& band,
    std::optional<int> discarded) {
  validate(band);
  std::vector<StreamInstance> selected;
  for (const StreamInstance& inst : batch) {
    const FeatureVector x = featurize(inst.text);
    if (!is_uncertain(model.predict_proba(x), band)) continue;
    if (discarded && model.predict(x) == *discarded) continue;
    selected.push_back(inst);
  }
  return selected;
}

}  // namespace annosim
