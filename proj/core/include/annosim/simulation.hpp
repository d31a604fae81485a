#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annosim/classifier.hpp"
#include "annosim/dataset.hpp"
#include "annosim/decay.hpp"
#include "annosim/metrics.hpp"
#include "annosim/oracle.hpp"
#include "annosim/sampling.hpp"
#include "annosim/types.hpp"

namespace annosim {

/// Everything a run needs; fully determines the outputs. The four seeds are
/// either set explicitly or derived from a master seed by fixed offsets
/// (split +1, model +2, oracle +3, sampler +4).
struct SimulationConfig {
  // data
  std::string data_path;
  IngestOptions ingest;

  // splits
  int n_warmup = 20;
  int bin_size = 36;
  double test_fraction = 0.2;
  bool stratify_test = false;

  // oracle
  DecayParams decay = decay_preset(DecayPreset::kNone);
  std::string decay_name = "none";  // preset name or "custom"
  ErrorTarget error_target = ErrorTarget::kMostActivated;
  ClockKey clock_key = ClockKey::kAssignedLabel;

  // classifier
  FeaturizerKind featurizer = FeaturizerKind::kHashed;
  int feature_dim = 256;
  std::uint64_t hash_seed = 1;
  std::string vectors_path;  // required for the pretrained featurizer
  ClassifierConfig classifier;

  // sampler
  SamplerPolicy policy = SamplerPolicy::kUncertainty;
  UncertaintyBand band;
  int discard_after_interval = 3;
  bool discard_per_annotation = false;  // recompute C_discarded per annotation

  // seeds
  std::uint64_t master_seed = 1;
  std::uint64_t split_seed = 2;
  std::uint64_t model_seed = 3;
  std::uint64_t oracle_seed = 4;
  std::uint64_t sampler_seed = 5;

  std::string output_dir;

  void derive_seeds();  // from master_seed, fixed offsets
};

void validate(const SimulationConfig& config);

/// Flattened canonical key=value view (sorted); the manifest embeds this and
/// the config hash is computed over it.
std::map<std::string, std::string> to_key_values(const SimulationConfig& c);
SimulationConfig config_from_key_values(
    const std::map<std::string, std::string>& kv);

/// Per-interval record emitted by a run.
struct IntervalMetrics {
  int interval_index = 0;  // 1-based
  int n_arrived = 0;
  int n_selected = 0;
  int n_annotated = 0;
  int n_oracle_errors = 0;
  std::optional<int> discarded_class;
  EvalReport eval;
};

struct RunManifest {
  std::string config_hash;
  std::map<std::string, std::string> config;
  std::string dataset_fingerprint;
  std::string started_at;
  std::string finished_at;
  std::string code_version;
};

/// One annotation event, persisted so per-interval error counts can be
/// re-derived offline.
struct AnnotationEvent {
  int interval_index = 0;
  std::string instance_id;
  int true_class = 0;
  int assigned_class = 0;
  bool was_error = false;
  double error_probability = 0.0;
};

struct RunResult {
  RunManifest manifest;
  std::vector<IntervalMetrics> intervals;
  std::vector<AnnotationEvent> annotations;
  std::vector<std::vector<std::string>> selected_ids;  // per interval
  /// Raw per-instance test-set probabilities per interval, for offline AUC
  /// recomputation: one row per (interval, test instance).
  std::vector<std::vector<std::vector<double>>> test_scores;
};

/// Runs the loop on an already-loaded dataset.
RunResult run_simulation(const SimulationConfig& config,
                         const std::vector<StreamInstance>& data,
                         const LabelSet& labels);

/// Loads config.data_path, then runs. Writes manifest.json (before metrics),
/// metrics.csv, scores.csv, and annotations.csv into config.output_dir when
/// it is non-empty.
RunResult run_simulation(const SimulationConfig& config,
                         const LabelSet& labels);

/// Writes the run artifacts for an in-memory run.
void write_run_outputs(const RunResult& result, const LabelSet& labels,
                       const std::string& output_dir);

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json_file(const std::string& path);

/// Aligned per-interval comparison across runs that share data and seeds and
/// differ in sampler policy and/or decay setting.
struct ComparisonTable {
  std::vector<std::string> run_ids;          // "<policy>_<decay>"
  std::vector<int> intervals;                // 1-based, union of all runs
  // metric -> run column -> per-interval values (NaN when a run is shorter)
  std::map<std::string, std::vector<std::vector<double>>> series;
  std::map<std::string, std::vector<double>> interval_means;  // per run column
};

ComparisonTable compare_runs(const std::vector<SimulationConfig>& configs,
                             const std::vector<StreamInstance>& data,
                             const LabelSet& labels);

/// Long-format (run_id, policy, decay, interval, metric, value) rows.
std::string comparison_to_csv(const ComparisonTable& table);

}  // namespace annosim
