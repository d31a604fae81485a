#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "annosim/types.hpp"

namespace annosim {

/// One stretch of the synthetic stream with a fixed class mix.
struct DriftSegment {
  int count = 0;                  // instances in this segment
  std::vector<double> class_mix;  // distribution over the K classes
};

/// Synthetic stream description: population drift through per-segment class
/// mixes, virtual drift through a class vocabulary window that slides by
/// vocab_shift tokens each segment. Class vocabularies are disjoint; the
/// noise vocabulary is shared and stationary.
struct DriftStreamSpec {
  int num_classes = 4;
  std::vector<DriftSegment> segments;
  int tokens_per_class = 40;   // width of the sliding vocabulary window
  int vocab_shift = 2;         // window advance per segment
  int tokens_per_instance = 9;
  double noise_rate = 0.30;    // per-token probability of a noise token
  int noise_vocab = 60;
};

void validate(const DriftStreamSpec& spec);

/// Synthesizes labeled instances with ordinal arrival times. Deterministic
/// per seed; two seeds share the schedule shape but not the texts.
std::vector<StreamInstance> generate_drift_stream(const DriftStreamSpec& spec,
                                                  std::uint64_t seed);

/// Default 4-class schedule: the dominant class rotates every `dwell`
/// segments, echoing how one report category crowds out the others as a
/// crisis unfolds.
DriftStreamSpec default_drift_spec(int segments = 28, int per_segment = 45,
                                   int dwell = 4, double dominant_share = 0.7);

}  // namespace annosim
