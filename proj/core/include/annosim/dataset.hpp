#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "annosim/types.hpp"

namespace annosim {

enum class IngestFormat { kAuto, kJsonLines, kDelimited };

/// Column/field mapping from an input file to StreamInstance fields.
struct IngestSchema {
  std::string id = "id";
  std::string timestamp = "timestamp";
  std::string text = "text";
  std::string label = "label";
  std::string confidence = "confidence";  // optional column, defaults to 1.0
};

struct IngestOptions {
  double min_confidence = 0.65;  // kept rows need confidence strictly greater
  IngestFormat format = IngestFormat::kAuto;  // kAuto selects by extension
  char delimiter = ',';
  IngestSchema schema;
};

/// Reads a JSON-lines or delimiter-separated dataset, mapping labels through
/// `labels` and dropping rows at or below the confidence threshold. Row order
/// is preserved. Throws IoError for unreadable files and std::runtime_error
/// naming the line for malformed rows, unknown labels, and duplicate ids.
std::vector<StreamInstance> ingest(const std::string& path,
                                   const LabelSet& labels,
                                   const IngestOptions& options = {});

/// Same parser over an already-loaded buffer; `origin` names the source in
/// error messages.
std::vector<StreamInstance> ingest_text(const std::string& content,
                                        const LabelSet& labels,
                                        const IngestOptions& options,
                                        const std::string& origin);

struct SplitOptions {
  int n_warmup = 20;
  int bin_size = 36;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  bool stratify_test = false;  // per-class proportional test draw
};

/// Test / warm-up / stream partition. The stream is sorted by arrival time
/// (ties broken by id) and read through `bin`.
struct DatasetSplits {
  std::vector<StreamInstance> test;
  std::vector<StreamInstance> warmup;
  std::vector<StreamInstance> stream;
  int bin_size = 1;

  int bin_count() const;
  /// i is 0-based; the last bin may be shorter than bin_size.
  std::span<const StreamInstance> bin(int i) const;
};

/// Draws the test set uniformly at random (fraction rounded down, minimum 1),
/// then exactly n_warmup instances per class from the remainder; everything
/// else becomes the stream. Deterministic per seed. Throws when a class has
/// too few instances left for the warm-up draw.
DatasetSplits prepare_splits(const std::vector<StreamInstance>& data,
                             const LabelSet& labels,
                             const SplitOptions& options);

/// FNV-1a fingerprint over ids, arrival times, labels, confidences, and
/// texts, in order. Recorded in run manifests.
std::uint64_t dataset_fingerprint(const std::vector<StreamInstance>& data);

}  // namespace annosim
