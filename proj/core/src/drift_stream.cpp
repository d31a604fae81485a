#include "annosim/drift_stream.hpp"

#include <cmath>
#include <stdexcept>

#include "annosim/util.hpp"

namespace annosim {

void validate(const DriftStreamSpec& spec) {
  if (spec.num_classes < 2) {
    throw std::invalid_argument("drift stream needs at least two classes");
  }
  if (spec.segments.empty()) {
    throw std::invalid_argument("drift stream needs at least one segment");
  }
  for (std::size_t s = 0; s < spec.segments.size(); ++s) {
    const DriftSegment& seg = spec.segments[s];
    if (seg.count < 0) {
      throw std::invalid_argument(strf("segment %zu has negative count", s));
    }
    if (static_cast<int>(seg.class_mix.size()) != spec.num_classes) {
      throw std::invalid_argument(
          strf("segment %zu mix has %zu entries, expected %d", s,
               seg.class_mix.size(), spec.num_classes));
    }
    double sum = 0.0;
    for (double p : seg.class_mix) {
      if (p < 0.0) {
        throw std::invalid_argument(strf("segment %zu mix has a negative entry", s));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument(
          strf("segment %zu mix sums to %s, expected 1", s,
               format_double(sum).c_str()));
    }
  }
  if (spec.tokens_per_class < 1) {
    throw std::invalid_argument("tokens_per_class must be >= 1");
  }
  if (spec.vocab_shift < 0) {
    throw std::invalid_argument("vocab_shift must be >= 0");
  }
  if (spec.tokens_per_instance < 1) {
    throw std::invalid_argument("tokens_per_instance must be >= 1");
  }
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0) {
    throw std::invalid_argument("noise_rate must be in [0, 1]");
  }
  if (spec.noise_rate > 0.0 && spec.noise_vocab < 1) {
    throw std::invalid_argument("noise_vocab must be >= 1 when noise_rate > 0");
  }
}

std::vector<StreamInstance> generate_drift_stream(const DriftStreamSpec& spec,
                                                  std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  std::vector<StreamInstance> out;
  std::size_t n = 0;
  for (std::size_t s = 0; s < spec.segments.size(); ++s) {
    const DriftSegment& seg = spec.segments[s];
    const int window_start = static_cast<int>(s) * spec.vocab_shift;
    for (int i = 0; i < seg.count; ++i, ++n) {
      // Class from the segment mix by inverse CDF walk.
      const double u = rng.next_double();
      double acc = 0.0;
      int cls = spec.num_classes;
      for (int c = 0; c < spec.num_classes; ++c) {
        acc += seg.class_mix[static_cast<std::size_t>(c)];
        if (u < acc) {
          cls = c + 1;
          break;
        }
      }
      if (cls > spec.num_classes) cls = spec.num_classes;  // rounding tail

      std::string text;
      for (int t = 0; t < spec.tokens_per_instance; ++t) {
        if (!text.empty()) text += ' ';
        const bool noise =
            spec.noise_rate > 0.0 && rng.next_double() < spec.noise_rate;
        if (noise) {
          text += strf("nz%llu",
                       static_cast<unsigned long long>(
                           rng.bounded(static_cast<std::uint64_t>(spec.noise_vocab))));
        } else {
          const int tok =
              window_start + static_cast<int>(rng.bounded(
                                 static_cast<std::uint64_t>(spec.tokens_per_class)));
          text += strf("c%dw%d", cls, tok);
        }
      }

      StreamInstance inst;
      inst.id = strf("syn-%06zu", n);
      inst.arrival_time = static_cast<double>(n);
      inst.text = std::move(text);
      inst.true_class = cls;
      inst.confidence = 1.0;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

DriftStreamSpec default_drift_spec(int segments, int per_segment, int dwell,
                                   double dominant_share) {
  if (segments < 1 || per_segment < 1 || dwell < 1) {
    throw std::invalid_argument("segments, per_segment, and dwell must be >= 1");
  }
  if (dominant_share < 0.0 || dominant_share > 1.0) {
    throw std::invalid_argument("dominant_share must be in [0, 1]");
  }
  DriftStreamSpec spec;
  const double rest =
      (1.0 - dominant_share) / static_cast<double>(spec.num_classes - 1);
  for (int s = 0; s < segments; ++s) {
    DriftSegment seg;
    seg.count = per_segment;
    const int dominant = (s / dwell) % spec.num_classes;
    for (int c = 0; c < spec.num_classes; ++c) {
      seg.class_mix.push_back(c == dominant ? dominant_share : rest);
    }
    spec.segments.push_back(std::move(seg));
  }
  return spec;
}

}  // namespace annosim
