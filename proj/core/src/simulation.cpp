#include "annosim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "annosim/error_matrix.hpp"
#include "annosim/util.hpp"

namespace annosim {
namespace {

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string clock_key_name(ClockKey key) {
  return key == ClockKey::kAssignedLabel ? "assigned_label" : "true_label";
}

ClockKey clock_key_from_name(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "assigned_label") return ClockKey::kAssignedLabel;
  if (n == "true_label") return ClockKey::kTrueLabel;
  throw ConfigError("unknown clock key '" + std::string(name) +
                    "' (expected assigned_label or true_label)");
}

std::string featurizer_name(FeaturizerKind kind) {
  return kind == FeaturizerKind::kHashed ? "hashed" : "pretrained";
}

FeaturizerKind featurizer_from_name(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "hashed") return FeaturizerKind::kHashed;
  if (n == "pretrained") return FeaturizerKind::kPretrained;
  throw ConfigError("unknown featurizer '" + std::string(name) +
                    "' (expected hashed or pretrained)");
}

std::string format_name(IngestFormat f) {
  switch (f) {
    case IngestFormat::kAuto:
      return "auto";
    case IngestFormat::kJsonLines:
      return "jsonl";
    case IngestFormat::kDelimited:
      return "delimited";
  }
  throw std::logic_error("unreachable");
}

IngestFormat format_from_name(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "auto") return IngestFormat::kAuto;
  if (n == "jsonl") return IngestFormat::kJsonLines;
  if (n == "delimited") return IngestFormat::kDelimited;
  throw ConfigError("unknown input format '" + std::string(name) +
                    "' (expected auto, jsonl, or delimited)");
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(strf("config key '%s': '%s' is not an unsigned integer",
                           key.c_str(), raw.c_str()));
  }
}

double parse_double_value(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(strf("config key '%s': '%s' is not a number", key.c_str(),
                           raw.c_str()));
  }
}

int parse_int_value(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    const long v = std::stol(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError(strf("config key '%s': '%s' is not an integer",
                           key.c_str(), raw.c_str()));
  }
}

bool parse_bool_value(const std::string& key, const std::string& raw) {
  const std::string v = lowercase(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(strf("config key '%s': '%s' is not a boolean", key.c_str(),
                         raw.c_str()));
}

std::string config_hash_of(const std::map<std::string, std::string>& kv) {
  std::uint64_t h = 0;
  for (const auto& [key, value] : kv) {
    h = fnv1a64(key, h);
    h = fnv1a64("=", h);
    h = fnv1a64(value, h);
  }
  return to_hex(h);
}

Featurizer make_featurizer(const SimulationConfig& config) {
  if (config.featurizer == FeaturizerKind::kHashed) {
    return Featurizer::hashed(config.feature_dim, config.hash_seed);
  }
  return Featurizer::pretrained(WordVectorTable::load(config.vectors_path));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void SimulationConfig::derive_seeds() {
  split_seed = master_seed + 1;
  model_seed = master_seed + 2;
  oracle_seed = master_seed + 3;
  sampler_seed = master_seed + 4;
}

void validate(const SimulationConfig& config) {
  if (config.n_warmup < 1) throw ConfigError("split.n_warmup must be >= 1");
  if (config.bin_size < 1) throw ConfigError("split.bin_size must be >= 1");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw ConfigError("split.test_fraction must be in (0, 1)");
  }
  if (config.ingest.min_confidence < 0.0 || config.ingest.min_confidence > 1.0) {
    throw ConfigError("data.min_confidence must be in [0, 1]");
  }
  try {
    validate(config.decay);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("oracle decay parameters: ") + e.what());
  }
  if (config.feature_dim < 1) throw ConfigError("classifier.dim must be >= 1");
  if (config.featurizer == FeaturizerKind::kPretrained &&
      config.vectors_path.empty()) {
    throw ConfigError(
        "classifier.vectors_path is required for the pretrained featurizer");
  }
  if (config.classifier.learning_rate <= 0.0) {
    throw ConfigError("classifier.lr must be > 0");
  }
  if (config.classifier.l2 < 0.0) throw ConfigError("classifier.reg must be >= 0");
  if (config.classifier.passes_per_update < 1) {
    throw ConfigError("classifier.passes must be >= 1");
  }
  if (config.classifier.warmup_epochs < 1) {
    throw ConfigError("classifier.warmup_epochs must be >= 1");
  }
  if (!(config.band.low >= 0.0 && config.band.low < config.band.high &&
        config.band.high <= 1.0)) {
    throw ConfigError("sampler.band_low/band_high require 0 <= low < high <= 1");
  }
  if (config.discard_after_interval < 0) {
    throw ConfigError("sampler.discard_after_interval must be >= 0");
  }
}

std::map<std::string, std::string> to_key_values(const SimulationConfig& c) {
  std::map<std::string, std::string> kv;
  kv["data.path"] = c.data_path;
  kv["data.min_confidence"] = format_double(c.ingest.min_confidence);
  kv["data.format"] = format_name(c.ingest.format);
  kv["data.delimiter"] = std::string(1, c.ingest.delimiter);
  kv["data.id_field"] = c.ingest.schema.id;
  kv["data.timestamp_field"] = c.ingest.schema.timestamp;
  kv["data.text_field"] = c.ingest.schema.text;
  kv["data.label_field"] = c.ingest.schema.label;
  kv["data.confidence_field"] = c.ingest.schema.confidence;
  kv["split.n_warmup"] = std::to_string(c.n_warmup);
  kv["split.bin_size"] = std::to_string(c.bin_size);
  kv["split.test_fraction"] = format_double(c.test_fraction);
  kv["split.stratify_test"] = c.stratify_test ? "true" : "false";
  kv["oracle.preset"] = c.decay_name;
  kv["oracle.alpha"] = format_double(c.decay.alpha);
  kv["oracle.beta"] = format_double(c.decay.beta);
  kv["oracle.gamma"] = format_double(c.decay.gamma);
  kv["oracle.error_target_policy"] = error_target_name(c.error_target);
  kv["oracle.clock_key"] = clock_key_name(c.clock_key);
  kv["classifier.featurizer"] = featurizer_name(c.featurizer);
  kv["classifier.dim"] = std::to_string(c.feature_dim);
  kv["classifier.hash_seed"] = std::to_string(c.hash_seed);
  kv["classifier.vectors_path"] = c.vectors_path;
  kv["classifier.lr"] = format_double(c.classifier.learning_rate);
  kv["classifier.reg"] = format_double(c.classifier.l2);
  kv["classifier.passes"] = std::to_string(c.classifier.passes_per_update);
  kv["classifier.warmup_epochs"] = std::to_string(c.classifier.warmup_epochs);
  kv["sampler.policy"] = sampler_policy_name(c.policy);
  kv["sampler.band_low"] = format_double(c.band.low);
  kv["sampler.band_high"] = format_double(c.band.high);
  kv["sampler.discard_after_interval"] = std::to_string(c.discard_after_interval);
  kv["sampler.discard_per_annotation"] =
      c.discard_per_annotation ? "true" : "false";
  kv["seed.master"] = std::to_string(c.master_seed);
  kv["seed.split"] = std::to_string(c.split_seed);
  kv["seed.model"] = std::to_string(c.model_seed);
  kv["seed.oracle"] = std::to_string(c.oracle_seed);
  kv["seed.sampler"] = std::to_string(c.sampler_seed);
  kv["output.dir"] = c.output_dir;
  return kv;
}

SimulationConfig config_from_key_values(
    const std::map<std::string, std::string>& kv) {
  SimulationConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("data.path")) c.data_path = *v;
  if (auto* v = get("data.min_confidence")) {
    c.ingest.min_confidence = parse_double_value("data.min_confidence", *v);
  }
  if (auto* v = get("data.format")) c.ingest.format = format_from_name(*v);
  if (auto* v = get("data.delimiter")) {
    if (v->size() != 1) throw ConfigError("data.delimiter must be one character");
    c.ingest.delimiter = (*v)[0];
  }
  if (auto* v = get("data.id_field")) c.ingest.schema.id = *v;
  if (auto* v = get("data.timestamp_field")) c.ingest.schema.timestamp = *v;
  if (auto* v = get("data.text_field")) c.ingest.schema.text = *v;
  if (auto* v = get("data.label_field")) c.ingest.schema.label = *v;
  if (auto* v = get("data.confidence_field")) c.ingest.schema.confidence = *v;
  if (auto* v = get("split.n_warmup")) c.n_warmup = parse_int_value("split.n_warmup", *v);
  if (auto* v = get("split.bin_size")) c.bin_size = parse_int_value("split.bin_size", *v);
  if (auto* v = get("split.test_fraction")) {
    c.test_fraction = parse_double_value("split.test_fraction", *v);
  }
  if (auto* v = get("split.stratify_test")) {
    c.stratify_test = parse_bool_value("split.stratify_test", *v);
  }
  if (auto* v = get("oracle.preset")) {
    c.decay_name = lowercase(*v);
    if (c.decay_name != "custom") {
      c.decay = decay_preset(decay_preset_from_name(c.decay_name));
    }
  }
  if (auto* v = get("oracle.alpha")) c.decay.alpha = parse_double_value("oracle.alpha", *v);
  if (auto* v = get("oracle.beta")) c.decay.beta = parse_double_value("oracle.beta", *v);
  if (auto* v = get("oracle.gamma")) c.decay.gamma = parse_double_value("oracle.gamma", *v);
  if (auto* v = get("oracle.error_target_policy")) {
    c.error_target = error_target_from_name(*v);
  }
  if (auto* v = get("oracle.clock_key")) c.clock_key = clock_key_from_name(*v);
  if (auto* v = get("classifier.featurizer")) c.featurizer = featurizer_from_name(*v);
  if (auto* v = get("classifier.dim")) c.feature_dim = parse_int_value("classifier.dim", *v);
  if (auto* v = get("classifier.hash_seed")) {
    c.hash_seed = parse_u64_value("classifier.hash_seed", *v);
  }
  if (auto* v = get("classifier.vectors_path")) c.vectors_path = *v;
  if (auto* v = get("classifier.lr")) {
    c.classifier.learning_rate = parse_double_value("classifier.lr", *v);
  }
  if (auto* v = get("classifier.reg")) {
    c.classifier.l2 = parse_double_value("classifier.reg", *v);
  }
  if (auto* v = get("classifier.passes")) {
    c.classifier.passes_per_update = parse_int_value("classifier.passes", *v);
  }
  if (auto* v = get("classifier.warmup_epochs")) {
    c.classifier.warmup_epochs = parse_int_value("classifier.warmup_epochs", *v);
  }
  if (auto* v = get("sampler.policy")) c.policy = sampler_policy_from_name(*v);
  if (auto* v = get("sampler.band_low")) {
    c.band.low = parse_double_value("sampler.band_low", *v);
  }
  if (auto* v = get("sampler.band_high")) {
    c.band.high = parse_double_value("sampler.band_high", *v);
  }
  if (auto* v = get("sampler.discard_after_interval")) {
    c.discard_after_interval = parse_int_value("sampler.discard_after_interval", *v);
  }
  if (auto* v = get("sampler.discard_per_annotation")) {
    c.discard_per_annotation = parse_bool_value("sampler.discard_per_annotation", *v);
  }
  if (auto* v = get("seed.master")) c.master_seed = parse_u64_value("seed.master", *v);
  // Explicit per-stage seeds win; otherwise everything derives from master.
  c.derive_seeds();
  if (auto* v = get("seed.split")) c.split_seed = parse_u64_value("seed.split", *v);
  if (auto* v = get("seed.model")) c.model_seed = parse_u64_value("seed.model", *v);
  if (auto* v = get("seed.oracle")) c.oracle_seed = parse_u64_value("seed.oracle", *v);
  if (auto* v = get("oracle.seed")) c.oracle_seed = parse_u64_value("oracle.seed", *v);
  if (auto* v = get("seed.sampler")) c.sampler_seed = parse_u64_value("seed.sampler", *v);
  if (auto* v = get("output.dir")) c.output_dir = *v;
  return c;
}

RunResult run_simulation(const SimulationConfig& config,
                         const std::vector<StreamInstance>& data,
                         const LabelSet& labels) {
  validate(config);
  const int k = labels.size();

  RunResult result;
  result.manifest.config = to_key_values(config);
  result.manifest.config_hash = config_hash_of(result.manifest.config);
  result.manifest.dataset_fingerprint = to_hex(dataset_fingerprint(data));
  result.manifest.code_version = kVersion;
  result.manifest.started_at = now_iso8601();

  SplitOptions split_options;
  split_options.n_warmup = config.n_warmup;
  split_options.bin_size = config.bin_size;
  split_options.seed = config.split_seed;
  split_options.test_fraction = config.test_fraction;
  split_options.stratify_test = config.stratify_test;
  const DatasetSplits splits = prepare_splits(data, labels, split_options);
  if (splits.stream.empty()) {
    throw std::runtime_error("stream is empty after the test/warm-up split");
  }

  const Featurizer featurize = make_featurizer(config);
  OnlineClassifier model(k, featurize.dim(), config.classifier,
                         config.model_seed);
  std::vector<std::pair<FeatureVector, int>> warmup_pool;
  warmup_pool.reserve(splits.warmup.size());
  for (const StreamInstance& inst : splits.warmup) {
    warmup_pool.emplace_back(featurize(inst.text), inst.true_class);
  }
  model.fit_warmup(warmup_pool);

  Oracle oracle(config.decay, k, config.oracle_seed, config.error_target,
                config.clock_key);
  ErrorMatrix matrix(k);

  for (int interval = 1; interval <= splits.bin_count(); ++interval) {
    const auto batch = splits.bin(interval - 1);
    matrix.begin_interval(interval);

    std::optional<int> discarded;
    if (config.policy == SamplerPolicy::kErrorAvoidance) {
      discarded = matrix.discarded_class(interval, config.discard_after_interval);
    }

    // Selection decisions are made with the interval-start model; annotations
    // then update the model one instance at a time in stream order.
    std::vector<StreamInstance> selection;
    switch (config.policy) {
      case SamplerPolicy::kUncertainty:
        selection = sample_uncertainty(batch, model, featurize, config.band);
        break;
      case SamplerPolicy::kRandom: {
        const std::size_t budget =
            sample_uncertainty(batch, model, featurize, config.band).size();
        const std::uint64_t interval_seed =
            fnv1a64(std::to_string(interval), config.sampler_seed);
        selection = sample_random(batch, budget, interval_seed);
        break;
      }
      case SamplerPolicy::kErrorAvoidance: {
        if (config.discard_per_annotation) {
          // Uncertainty set fixed at interval start; the discard filter is
          // re-evaluated against the freshest matrix inside the loop below.
          selection = sample_uncertainty(batch, model, featurize, config.band);
        } else {
          selection = sample_error_avoidance(batch, model, featurize,
                                             config.band, discarded);
        }
        break;
      }
    }

    // Predicted classes at selection time, for the per-annotation discard
    // filter and the annotation loop.
    std::vector<int> predicted_at_selection;
    predicted_at_selection.reserve(selection.size());
    for (const StreamInstance& inst : selection) {
      predicted_at_selection.push_back(model.predict(featurize(inst.text)));
    }

    IntervalMetrics metrics;
    metrics.interval_index = interval;
    metrics.n_arrived = static_cast<int>(batch.size());
    metrics.discarded_class = discarded;

    std::vector<std::string> annotated_ids;
    std::optional<int> live_discarded = discarded;
    for (std::size_t i = 0; i < selection.size(); ++i) {
      const StreamInstance& inst = selection[i];
      if (config.policy == SamplerPolicy::kErrorAvoidance &&
          config.discard_per_annotation && live_discarded &&
          predicted_at_selection[i] == *live_discarded) {
        continue;
      }
      const AnnotationResult annotation = oracle.annotate(inst);
      model.partial_update(featurize(inst.text), annotation.assigned_label);
      matrix.add_annotation(inst, annotation.assigned_label, model, featurize);
      if (config.policy == SamplerPolicy::kErrorAvoidance &&
          config.discard_per_annotation) {
        live_discarded =
            matrix.discarded_class(interval, config.discard_after_interval);
      }

      annotated_ids.push_back(inst.id);
      AnnotationEvent event;
      event.interval_index = interval;
      event.instance_id = inst.id;
      event.true_class = inst.true_class;
      event.assigned_class = annotation.assigned_label;
      event.was_error = annotation.was_error;
      event.error_probability = annotation.error_probability_used;
      result.annotations.push_back(std::move(event));
      if (annotation.was_error) ++metrics.n_oracle_errors;
    }
    metrics.n_selected = static_cast<int>(annotated_ids.size());
    metrics.n_annotated = metrics.n_selected;

    std::vector<std::vector<double>> interval_scores;
    interval_scores.reserve(splits.test.size());
    for (const StreamInstance& inst : splits.test) {
      interval_scores.push_back(model.predict_proba(featurize(inst.text)));
    }
    metrics.eval = evaluate(model, splits.test, featurize, k);

    result.intervals.push_back(std::move(metrics));
    result.selected_ids.push_back(std::move(annotated_ids));
    result.test_scores.push_back(std::move(interval_scores));
  }

  result.manifest.finished_at = now_iso8601();
  return result;
}

RunResult run_simulation(const SimulationConfig& config,
                         const LabelSet& labels) {
  validate(config);
  if (config.data_path.empty()) {
    throw ConfigError("data.path is required");
  }
  const std::vector<StreamInstance> data =
      ingest(config.data_path, labels, config.ingest);

  if (!config.output_dir.empty()) {
    // Manifest lands before any metrics so a crashed run still identifies
    // itself.
    std::filesystem::create_directories(config.output_dir);
    RunManifest pre;
    pre.config = to_key_values(config);
    pre.config_hash = config_hash_of(pre.config);
    pre.dataset_fingerprint = to_hex(dataset_fingerprint(data));
    pre.code_version = kVersion;
    pre.started_at = now_iso8601();
    std::ofstream out(std::filesystem::path(config.output_dir) / "manifest.json");
    out << manifest_to_json(pre) << '\n';
  }

  RunResult result = run_simulation(config, data, labels);
  if (!config.output_dir.empty()) {
    write_run_outputs(result, labels, config.output_dir);
  }
  return result;
}

void write_run_outputs(const RunResult& result, const LabelSet& labels,
                       const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  const fs::path dir(output_dir);

  {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + output_dir);
    out << manifest_to_json(result.manifest) << '\n';
  }

  const int k = labels.size();
  {
    std::ofstream out(dir / "metrics.csv");
    if (!out) throw IoError("cannot write metrics in " + output_dir);
    out << "interval,n_arrived,n_selected,n_annotated,n_oracle_errors,"
           "discarded_class,accuracy,macro_auc,macro_f1";
    for (int c = 1; c <= k; ++c) out << ",auc_" << labels.name_of(c);
    for (int c = 1; c <= k; ++c) out << ",f1_" << labels.name_of(c);
    out << '\n';
    for (const IntervalMetrics& m : result.intervals) {
      out << m.interval_index << ',' << m.n_arrived << ',' << m.n_selected
          << ',' << m.n_annotated << ',' << m.n_oracle_errors << ',';
      if (m.discarded_class) out << labels.name_of(*m.discarded_class);
      out << ',' << format_double(m.eval.accuracy) << ','
          << format_double(m.eval.macro_auc) << ','
          << format_double(m.eval.macro_f1);
      for (int c = 1; c <= k; ++c) {
        out << ',';
        auto it = m.eval.per_class_auc.find(c);
        if (it != m.eval.per_class_auc.end()) out << format_double(it->second);
      }
      for (int c = 1; c <= k; ++c) {
        out << ',';
        auto it = m.eval.per_class_f1.find(c);
        if (it != m.eval.per_class_f1.end()) out << format_double(it->second);
      }
      out << '\n';
    }
  }

  {
    std::ofstream out(dir / "scores.csv");
    if (!out) throw IoError("cannot write scores in " + output_dir);
    out << "interval,test_row";
    for (int c = 1; c <= k; ++c) out << ",p_" << labels.name_of(c);
    out << '\n';
    for (std::size_t i = 0; i < result.test_scores.size(); ++i) {
      for (std::size_t row = 0; row < result.test_scores[i].size(); ++row) {
        out << (i + 1) << ',' << row;
        for (double p : result.test_scores[i][row]) {
          out << ',' << format_double(p);
        }
        out << '\n';
      }
    }
  }

  {
    std::ofstream out(dir / "annotations.csv");
    if (!out) throw IoError("cannot write annotations in " + output_dir);
    out << "interval,instance_id,true_class,assigned_class,was_error,"
           "error_probability\n";
    for (const AnnotationEvent& e : result.annotations) {
      out << e.interval_index << ',' << csv_escape(e.instance_id) << ','
          << labels.name_of(e.true_class) << ','
          << labels.name_of(e.assigned_class) << ','
          << (e.was_error ? "true" : "false") << ','
          << format_double(e.error_probability) << '\n';
    }
  }
}

std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["config_hash"] = manifest.config_hash;
  j["config"] = manifest.config;
  j["dataset_fingerprint"] = manifest.dataset_fingerprint;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["code_version"] = manifest.code_version;
  return j.dump(2);
}

RunManifest manifest_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": invalid manifest JSON: " + e.what());
  }
  RunManifest manifest;
  manifest.config_hash = j.value("config_hash", "");
  manifest.dataset_fingerprint = j.value("dataset_fingerprint", "");
  manifest.started_at = j.value("started_at", "");
  manifest.finished_at = j.value("finished_at", "");
  manifest.code_version = j.value("code_version", "");
  if (j.contains("config")) {
    for (const auto& [key, value] : j.at("config").items()) {
      manifest.config[key] = value.get<std::string>();
    }
  }
  return manifest;
}

ComparisonTable compare_runs(const std::vector<SimulationConfig>& configs,
                             const std::vector<StreamInstance>& data,
                             const LabelSet& labels) {
  if (configs.empty()) throw std::invalid_argument("no configs to compare");

  // Runs must differ only in sampler policy and decay setting.
  auto comparable_view = [](const SimulationConfig& c) {
    auto kv = to_key_values(c);
    kv.erase("sampler.policy");
    kv.erase("oracle.preset");
    kv.erase("oracle.alpha");
    kv.erase("oracle.beta");
    kv.erase("oracle.gamma");
    kv.erase("output.dir");
    return kv;
  };
  const auto reference = comparable_view(configs.front());
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (comparable_view(configs[i]) != reference) {
      throw std::invalid_argument(
          "compared configs may differ only in sampler policy and decay");
    }
  }

  ComparisonTable table;
  std::vector<RunResult> runs;
  runs.reserve(configs.size());
  std::size_t max_intervals = 0;
  for (const SimulationConfig& config : configs) {
    runs.push_back(run_simulation(config, data, labels));
    table.run_ids.push_back(sampler_policy_name(config.policy) + "_" +
                            config.decay_name);
    max_intervals = std::max(max_intervals, runs.back().intervals.size());
  }
  for (std::size_t i = 1; i <= max_intervals; ++i) {
    table.intervals.push_back(static_cast<int>(i));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<std::string> metric_names = {"macro_auc", "accuracy",
                                                 "macro_f1"};
  for (const std::string& metric : metric_names) {
    auto& columns = table.series[metric];
    auto& means = table.interval_means[metric];
    for (const RunResult& run : runs) {
      std::vector<double> column;
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < max_intervals; ++i) {
        if (i >= run.intervals.size()) {
          column.push_back(nan);
          continue;
        }
        const EvalReport& eval = run.intervals[i].eval;
        double v = 0.0;
        if (metric == "macro_auc") {
          v = eval.macro_auc;
        } else if (metric == "accuracy") {
          v = eval.accuracy;
        } else {
          v = eval.macro_f1;
        }
        column.push_back(v);
        sum += v;
        ++count;
      }
      columns.push_back(std::move(column));
      means.push_back(count > 0 ? sum / static_cast<double>(count) : nan);
    }
  }
  return table;
}

std::string comparison_to_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "run_id,policy,decay,interval,metric,value\n";
  auto emit_run_id = [&](const std::string& run_id) {
    // run ids are "<policy>_<decay>"; decay names carry no underscore
    const std::size_t cut = run_id.find_last_of('_');
    const std::string policy = run_id.substr(0, cut);
    const std::string decay = cut == std::string::npos ? "" : run_id.substr(cut + 1);
    out << run_id << ',' << policy << ',' << decay << ',';
  };
  for (const auto& [metric, columns] : table.series) {
    for (std::size_t r = 0; r < table.run_ids.size(); ++r) {
      for (std::size_t i = 0; i < table.intervals.size(); ++i) {
        const double v = columns[r][i];
        if (std::isnan(v)) continue;
        emit_run_id(table.run_ids[r]);
        out << table.intervals[i] << ',' << metric << ',' << format_double(v)
            << '\n';
      }
    }
  }
  for (const auto& [metric, means] : table.interval_means) {
    for (std::size_t r = 0; r < table.run_ids.size(); ++r) {
      if (std::isnan(means[r])) continue;
      emit_run_id(table.run_ids[r]);
      out << "mean," << metric << ',' << format_double(means[r]) << '\n';
    }
  }
  return out.str();
}

}  // namespace annosim
