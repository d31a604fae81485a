// Command-line front end: ingest | simulate | compare | schedule | analyze |
// gen-synthetic. Exit codes: 0 success, 2 invalid configuration, 3 missing
// input file, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "annosim/config.hpp"
#include "annosim/dataset.hpp"
#include "annosim/decay.hpp"
#include "annosim/drift_stream.hpp"
#include "annosim/oracle.hpp"
#include "annosim/sampling.hpp"
#include "annosim/schedules.hpp"
#include "annosim/simulation.hpp"
#include "annosim/types.hpp"
#include "annosim/util.hpp"

namespace {

using namespace annosim;
namespace fs = std::filesystem;

constexpr const char* kOutRootEnv = "ANNOSIM_OUT_ROOT";

// Every config key any subcommand understands; shared files validate once
// against this list so a typo never passes silently.
const std::vector<std::string> kKnownConfigKeys = {
    "data.path",
    "data.min_confidence",
    "data.format",
    "data.delimiter",
    "data.id_field",
    "data.timestamp_field",
    "data.text_field",
    "data.label_field",
    "data.confidence_field",
    "split.n_warmup",
    "split.bin_size",
    "split.test_fraction",
    "split.stratify_test",
    "oracle.preset",
    "oracle.alpha",
    "oracle.beta",
    "oracle.gamma",
    "oracle.error_target_policy",
    "oracle.clock_key",
    "oracle.seed",
    "classifier.featurizer",
    "classifier.dim",
    "classifier.hash_seed",
    "classifier.vectors_path",
    "classifier.lr",
    "classifier.reg",
    "classifier.passes",
    "classifier.warmup_epochs",
    "sampler.policy",
    "sampler.band_low",
    "sampler.band_high",
    "sampler.discard_after_interval",
    "sampler.discard_per_annotation",
    "seed.master",
    "seed.split",
    "seed.model",
    "seed.oracle",
    "seed.sampler",
    "output.dir",
    "compare.policies",
    "compare.decays",
    "schedule.kind",
    "schedule.length",
    "schedule.gap_min",
    "schedule.gap_max",
    "synthetic.segments",
    "synthetic.per_segment",
    "synthetic.dwell",
    "synthetic.dominant_share",
    "synthetic.tokens_per_class",
    "synthetic.vocab_shift",
    "synthetic.tokens_per_instance",
    "synthetic.noise_rate",
    "synthetic.noise_vocab",
};

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

KeyValueConfig load_config(const std::string& path) {
  KeyValueConfig config = KeyValueConfig::parse_file(path);
  config.require_known(kKnownConfigKeys);
  return config;
}

std::map<std::string, std::string> config_entries(const KeyValueConfig& config) {
  return config.entries();
}

std::string default_out_dir(const std::string& hint) {
  const char* root = std::getenv(kOutRootEnv);
  if (root == nullptr || *root == '\0') return "";
  return (fs::path(root) / hint).string();
}

std::string instances_to_jsonl(const std::vector<StreamInstance>& data,
                               const LabelSet& labels) {
  std::ostringstream out;
  for (const StreamInstance& inst : data) {
    nlohmann::json rec;
    rec["id"] = inst.id;
    rec["timestamp"] = inst.arrival_time;
    rec["text"] = inst.text;
    rec["label"] = labels.name_of(inst.true_class);
    rec["confidence"] = inst.confidence;
    out << rec.dump() << '\n';
  }
  return out.str();
}

// ---- simulate / compare ----

struct SimulateArgs {
  std::string config_path;
  std::string replay_path;
  std::string data;
  std::string out;
  std::string policy;
  std::string decay;
  std::string error_target;
  std::string clock_key;
  std::string featurizer;
  std::string vectors;
  double min_confidence = 0.65;
  int warmup = 20;
  int bin_size = 36;
  double test_fraction = 0.2;
  bool stratify_test = false;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int feature_dim = 256;
  std::uint64_t hash_seed = 1;
  double lr = 0.1;
  double reg = 1e-4;
  int passes = 5;
  int warmup_epochs = 50;
  double band_low = 0.30;
  double band_high = 0.70;
  int discard_after = 3;
  bool discard_per_annotation = false;
  std::uint64_t seed = 1;
  std::uint64_t split_seed = 0;
  std::uint64_t model_seed = 0;
  std::uint64_t oracle_seed = 0;
  std::uint64_t sampler_seed = 0;
};

void add_simulation_flags(CLI::App* cmd, SimulateArgs& args) {
  cmd->add_option("--data", args.data, "Dataset file (JSON lines or delimited)");
  cmd->add_option("--policy", args.policy,
                  "Sampler policy: random | uncertainty | error_avoidance");
  cmd->add_option("--decay", args.decay,
                  "Oracle decay preset: slow | fast | none | custom");
  cmd->add_option("--alpha", args.alpha, "Custom decay rate (implies --decay custom)");
  cmd->add_option("--beta", args.beta, "Custom decay offset (implies --decay custom)");
  cmd->add_option("--gamma", args.gamma, "Custom decay ceiling (implies --decay custom)");
  cmd->add_option("--error-target", args.error_target,
                  "Erroneous label choice: most_activated | uniform_other");
  cmd->add_option("--clock-key", args.clock_key,
                  "Decay clock refresh key: assigned_label | true_label");
  cmd->add_option("--min-confidence", args.min_confidence,
                  "Keep rows with confidence strictly greater than this")
      ->capture_default_str();
  cmd->add_option("--warmup", args.warmup, "Warm-up instances per class")
      ->capture_default_str();
  cmd->add_option("--bin-size", args.bin_size, "Instances per stream interval")
      ->capture_default_str();
  cmd->add_option("--test-fraction", args.test_fraction,
                  "Held-out test fraction")
      ->capture_default_str();
  cmd->add_flag("--stratify-test", args.stratify_test,
                "Draw the test split per class instead of uniformly");
  cmd->add_option("--featurizer", args.featurizer,
                  "Feature extractor: hashed | pretrained");
  cmd->add_option("--feature-dim", args.feature_dim,
                  "Hashed feature dimension")
      ->capture_default_str();
  cmd->add_option("--hash-seed", args.hash_seed, "Feature hashing seed")
      ->capture_default_str();
  cmd->add_option("--vectors", args.vectors,
                  "Word-vector text file for the pretrained featurizer");
  cmd->add_option("--lr", args.lr, "SGD learning rate")->capture_default_str();
  cmd->add_option("--reg", args.reg, "L2 regularization strength")
      ->capture_default_str();
  cmd->add_option("--passes", args.passes, "Gradient passes per annotation")
      ->capture_default_str();
  cmd->add_option("--warmup-epochs", args.warmup_epochs,
                  "Epochs over the warm-up pool")
      ->capture_default_str();
  cmd->add_option("--band-low", args.band_low, "Uncertainty band lower bound")
      ->capture_default_str();
  cmd->add_option("--band-high", args.band_high, "Uncertainty band upper bound")
      ->capture_default_str();
  cmd->add_option("--discard-after", args.discard_after,
                  "First interval eligible for a discarded class")
      ->capture_default_str();
  cmd->add_flag("--discard-per-annotation", args.discard_per_annotation,
                "Recompute the discarded class after every annotation");
  cmd->add_option("--split-seed", args.split_seed, "Override the split seed");
  cmd->add_option("--model-seed", args.model_seed, "Override the model seed");
  cmd->add_option("--oracle-seed", args.oracle_seed, "Override the oracle seed");
  cmd->add_option("--sampler-seed", args.sampler_seed,
                  "Override the sampler seed");
}

SimulationConfig build_simulation_config(const CLI::App* cmd,
                                         const SimulateArgs& args) {
  SimulationConfig cfg;
  if (!args.config_path.empty()) {
    cfg = config_from_key_values(config_entries(load_config(args.config_path)));
  }

  auto passed = [&](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (passed("--data")) cfg.data_path = args.data;
  if (passed("--min-confidence")) cfg.ingest.min_confidence = args.min_confidence;
  if (passed("--warmup")) cfg.n_warmup = args.warmup;
  if (passed("--bin-size")) cfg.bin_size = args.bin_size;
  if (passed("--test-fraction")) cfg.test_fraction = args.test_fraction;
  if (passed("--stratify-test")) cfg.stratify_test = true;
  if (passed("--policy")) cfg.policy = sampler_policy_from_name(args.policy);
  if (passed("--decay")) {
    cfg.decay_name = lowercase(args.decay);
    if (cfg.decay_name != "custom") {
      cfg.decay = decay_preset(decay_preset_from_name(cfg.decay_name));
    }
  }
  if (passed("--alpha")) {
    cfg.decay.alpha = args.alpha;
    cfg.decay_name = "custom";
  }
  if (passed("--beta")) {
    cfg.decay.beta = args.beta;
    cfg.decay_name = "custom";
  }
  if (passed("--gamma")) {
    cfg.decay.gamma = args.gamma;
    cfg.decay_name = "custom";
  }
  if (passed("--error-target")) {
    cfg.error_target = error_target_from_name(args.error_target);
  }
  if (passed("--clock-key")) {
    cfg.clock_key = args.clock_key == "true_label" ? ClockKey::kTrueLabel
                                                   : ClockKey::kAssignedLabel;
  }
  if (passed("--featurizer")) {
    cfg.featurizer = lowercase(args.featurizer) == "pretrained"
                         ? FeaturizerKind::kPretrained
                         : FeaturizerKind::kHashed;
  }
  if (passed("--feature-dim")) cfg.feature_dim = args.feature_dim;
  if (passed("--hash-seed")) cfg.hash_seed = args.hash_seed;
  if (passed("--vectors")) {
    cfg.vectors_path = args.vectors;
    cfg.featurizer = FeaturizerKind::kPretrained;
  }
  if (passed("--lr")) cfg.classifier.learning_rate = args.lr;
  if (passed("--reg")) cfg.classifier.l2 = args.reg;
  if (passed("--passes")) cfg.classifier.passes_per_update = args.passes;
  if (passed("--warmup-epochs")) cfg.classifier.warmup_epochs = args.warmup_epochs;
  if (passed("--band-low")) cfg.band.low = args.band_low;
  if (passed("--band-high")) cfg.band.high = args.band_high;
  if (passed("--discard-after")) cfg.discard_after_interval = args.discard_after;
  if (passed("--discard-per-annotation")) cfg.discard_per_annotation = true;
  if (passed("--seed")) {
    cfg.master_seed = args.seed;
    cfg.derive_seeds();
  }
  if (passed("--split-seed")) cfg.split_seed = args.split_seed;
  if (passed("--model-seed")) cfg.model_seed = args.model_seed;
  if (passed("--oracle-seed")) cfg.oracle_seed = args.oracle_seed;
  if (passed("--sampler-seed")) cfg.sampler_seed = args.sampler_seed;
  if (passed("--out")) cfg.output_dir = args.out;
  return cfg;
}

int run_simulate(const CLI::App* cmd, SimulateArgs& args) {
  SimulationConfig cfg;
  if (!args.replay_path.empty()) {
    const RunManifest manifest = manifest_from_json_file(args.replay_path);
    cfg = config_from_key_values(manifest.config);
    if (cmd->count("--out") > 0) cfg.output_dir = args.out;
  } else {
    cfg = build_simulation_config(cmd, args);
  }
  if (cfg.output_dir.empty()) {
    const auto kv = to_key_values(cfg);
    std::uint64_t h = 0;
    for (const auto& [k, v] : kv) h = fnv1a64(k + "=" + v, h);
    cfg.output_dir = default_out_dir("run-" + to_hex(h));
  }
  validate(cfg);

  const LabelSet labels;
  const RunResult result = run_simulation(cfg, labels);
  for (const IntervalMetrics& m : result.intervals) {
    std::cout << "interval " << m.interval_index << ": arrived " << m.n_arrived
              << ", annotated " << m.n_annotated << ", oracle errors "
              << m.n_oracle_errors << ", macro AUC "
              << strf("%.4f", m.eval.macro_auc);
    if (m.discarded_class) {
      std::cout << ", discarded " << labels.name_of(*m.discarded_class);
    }
    std::cout << '\n';
  }
  if (!cfg.output_dir.empty()) {
    std::cout << "run artifacts in " << cfg.output_dir << '\n';
  }
  return 0;
}

std::vector<std::string> parse_list(const std::string& csv) {
  std::vector<std::string> out;
  for (const std::string& item : split(csv, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

int run_compare(const CLI::App* cmd, SimulateArgs& args,
                std::string& policies_csv, std::string& decays_csv) {
  SimulationConfig base;
  std::string out_dir;
  if (!args.replay_path.empty()) {
    const RunManifest manifest = manifest_from_json_file(args.replay_path);
    base = config_from_key_values(manifest.config);
    auto it = manifest.config.find("compare.policies");
    if (it != manifest.config.end()) policies_csv = it->second;
    it = manifest.config.find("compare.decays");
    if (it != manifest.config.end()) decays_csv = it->second;
    out_dir = cmd->count("--out") > 0 ? args.out : base.output_dir;
  } else {
    base = build_simulation_config(cmd, args);
    if (!args.config_path.empty()) {
      const KeyValueConfig file_config = load_config(args.config_path);
      if (cmd->count("--policies") == 0 && file_config.has("compare.policies")) {
        policies_csv = file_config.get_string("compare.policies", policies_csv);
      }
      if (cmd->count("--decays") == 0 && file_config.has("compare.decays")) {
        decays_csv = file_config.get_string("compare.decays", decays_csv);
      }
    }
    out_dir = base.output_dir;
  }
  if (out_dir.empty()) out_dir = default_out_dir("compare");
  base.output_dir.clear();

  const std::vector<std::string> policies = parse_list(policies_csv);
  const std::vector<std::string> decays = parse_list(decays_csv);
  if (policies.empty() || decays.empty()) {
    throw ConfigError("compare needs at least one policy and one decay preset");
  }

  std::vector<SimulationConfig> configs;
  for (const std::string& decay : decays) {
    for (const std::string& policy : policies) {
      SimulationConfig cfg = base;
      cfg.policy = sampler_policy_from_name(policy);
      cfg.decay_name = lowercase(decay);
      if (cfg.decay_name != "custom") {
        cfg.decay = decay_preset(decay_preset_from_name(cfg.decay_name));
      }
      validate(cfg);
      configs.push_back(std::move(cfg));
    }
  }

  const LabelSet labels;
  if (base.data_path.empty()) throw ConfigError("data.path is required");
  const std::vector<StreamInstance> data =
      ingest(base.data_path, labels, base.ingest);

  if (!out_dir.empty()) {
    RunManifest manifest;
    manifest.config = to_key_values(base);
    manifest.config["compare.policies"] = policies_csv;
    manifest.config["compare.decays"] = decays_csv;
    std::uint64_t h = 0;
    for (const auto& [k, v] : manifest.config) h = fnv1a64(k + "=" + v, h);
    manifest.config_hash = to_hex(h);
    manifest.dataset_fingerprint = to_hex(dataset_fingerprint(data));
    manifest.code_version = kVersion;
    write_text_file(fs::path(out_dir) / "manifest.json",
                    manifest_to_json(manifest) + "\n");
  }

  const ComparisonTable table = compare_runs(configs, data, labels);
  const std::string csv = comparison_to_csv(table);
  if (!out_dir.empty()) {
    write_text_file(fs::path(out_dir) / "comparison.csv", csv);
    std::cout << "comparison in " << out_dir << '\n';
  } else {
    std::cout << csv;
  }

  const auto& means = table.interval_means.at("macro_auc");
  for (std::size_t r = 0; r < table.run_ids.size(); ++r) {
    std::cout << table.run_ids[r] << ": mean macro AUC "
              << strf("%.4f", means[r]) << '\n';
  }
  return 0;
}

// ---- schedule ----

ClassPools pools_from_data(const std::vector<StreamInstance>& data) {
  ClassPools pools;
  for (const StreamInstance& inst : data) pools[inst.true_class].push_back(inst);
  return pools;
}

ClassPools synthetic_pools(const LabelSet& labels, int per_class) {
  ClassPools pools;
  for (int c = 1; c <= labels.size(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      StreamInstance inst;
      inst.id = strf("pool-c%d-%03d", c, i + 1);
      inst.arrival_time = static_cast<double>(i);
      inst.text = strf("sample %s item %d", labels.name_of(c).c_str(), i + 1);
      inst.true_class = c;
      pools[c].push_back(std::move(inst));
    }
  }
  return pools;
}

int run_schedule(const CLI::App* cmd, const std::string& config_path,
                 std::string kind_name, const std::string& data_path,
                 const std::string& out, std::uint64_t seed, std::size_t length,
                 int gap_min, int gap_max) {
  const LabelSet labels;
  if (!config_path.empty()) {
    const KeyValueConfig config = load_config(config_path);
    if (cmd->count("--kind") == 0) {
      kind_name = config.get_string("schedule.kind", kind_name);
    }
    if (cmd->count("--length") == 0) {
      length = static_cast<std::size_t>(config.get_long("schedule.length",
                                                        static_cast<long>(length)));
    }
    if (cmd->count("--gap-min") == 0) gap_min = static_cast<int>(config.get_long("schedule.gap_min", gap_min));
    if (cmd->count("--gap-max") == 0) gap_max = static_cast<int>(config.get_long("schedule.gap_max", gap_max));
  }
  const ScheduleKind kind = schedule_kind_from_name(kind_name);

  std::vector<StreamInstance> data;
  if (!data_path.empty()) data = ingest(data_path, labels, {});

  AnnotationSchedule schedule;
  if (kind == ScheduleKind::kSlip || kind == ScheduleKind::kMistake) {
    const ClassPools pools =
        data.empty() ? synthetic_pools(labels, 8) : pools_from_data(data);
    schedule = kind == ScheduleKind::kSlip ? slip_schedule(pools, labels)
                                           : mistake_schedule(pools, labels);
  } else {
    std::vector<StreamInstance> ground_truth;
    std::vector<StreamInstance> noise;
    const int noise_class = labels.size();
    if (!data.empty()) {
      for (const StreamInstance& inst : data) {
        (inst.true_class == noise_class ? noise : ground_truth).push_back(inst);
      }
    } else {
      const std::size_t budget = length == 0 ? 800 : length;
      for (std::size_t i = 0; i < budget; ++i) {
        StreamInstance inst;
        inst.id = strf("lab-gt-%04zu", i);
        inst.arrival_time = static_cast<double>(i);
        inst.true_class = static_cast<int>(i % (labels.size() - 1)) + 1;
        inst.text = strf("ground truth %s %zu",
                         labels.name_of(inst.true_class).c_str(), i);
        ground_truth.push_back(std::move(inst));
        StreamInstance nz;
        nz.id = strf("lab-nz-%04zu", i);
        nz.arrival_time = static_cast<double>(i);
        nz.true_class = noise_class;
        nz.text = strf("noise item %zu", i);
        noise.push_back(std::move(nz));
      }
    }
    schedule = lab_stream(ground_truth, noise, seed, gap_min, gap_max, length);
  }

  const std::string json = schedule_to_json(schedule, labels) + "\n";
  if (out.empty()) {
    std::cout << json;
  } else {
    write_text_file(out, json);
    nlohmann::json manifest;
    manifest["command"] = "schedule";
    manifest["kind"] = schedule_kind_name(kind);
    manifest["data"] = data_path;
    manifest["seed"] = seed;
    manifest["length"] = length;
    manifest["gap_min"] = gap_min;
    manifest["gap_max"] = gap_max;
    manifest["code_version"] = kVersion;
    write_text_file(out + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << "schedule (" << schedule.size() << " positions) in " << out
              << '\n';
  }
  return 0;
}

// ---- analyze ----

int run_analyze(const std::string& schedule_path,
                const std::string& responses_path, const std::string& test_name,
                const std::string& out, const std::string& gap_out) {
  const LabelSet labels;
  const AnnotationSchedule schedule =
      schedule_from_json_file(schedule_path, labels);
  const ResponseSet responses =
      responses_from_csv_file(responses_path, labels, schedule.size());

  SignificanceTest test = SignificanceTest::kTwoProportionZ;
  const std::string t = lowercase(test_name);
  if (t == "binomial") {
    test = SignificanceTest::kExactBinomial;
  } else if (t != "z") {
    throw ConfigError("unknown significance test '" + test_name +
                      "' (expected z or binomial)");
  }

  nlohmann::json report_json;
  report_json["judges"] = responses.judge_ids.size();
  if (!schedule.target_positions.empty()) {
    const PositionErrorReport report =
        analyze_positions(schedule, responses, test);
    std::cout << "target class: " << labels.name_of(schedule.target_class)
              << '\n';
    for (std::size_t i = 0; i < report.positions.size(); ++i) {
      std::cout << "position " << report.positions[i] << ": error rate "
                << strf("%.4f", report.error_rates[i]) << " ("
                << report.error_counts[i] << "/" << report.responses_per_position
                << ")\n";
    }
    std::cout << "last vs pooled earlier p-value ("
              << (test == SignificanceTest::kTwoProportionZ ? "z" : "binomial")
              << " test): " << strf("%.6g", report.p_value) << '\n';
    report_json["positions"] = report.positions;
    report_json["error_rates"] = report.error_rates;
    report_json["error_counts"] = report.error_counts;
    report_json["responses_per_position"] = report.responses_per_position;
    report_json["p_value"] = report.p_value;
    report_json["test"] =
        test == SignificanceTest::kTwoProportionZ ? "z" : "binomial";
  } else {
    std::cout << "schedule has no target positions; skipping position analysis\n";
  }

  const std::vector<GapAccuracyRow> curve =
      gap_accuracy_curve(schedule, responses);
  if (!gap_out.empty()) {
    std::ostringstream csv;
    csv << "class,gap_steps,correct,total\n";
    for (const GapAccuracyRow& row : curve) {
      csv << labels.name_of(row.class_index) << ',' << row.gap_steps << ','
          << row.correct << ',' << row.total << '\n';
    }
    write_text_file(gap_out, csv.str());
    std::cout << "gap accuracy curve in " << gap_out << '\n';
  }
  if (!out.empty()) {
    write_text_file(out, report_json.dump(2) + "\n");
    std::cout << "report in " << out << '\n';
  }
  return 0;
}

// ---- ingest / gen-synthetic ----

int run_ingest(const CLI::App* cmd, SimulateArgs& args) {
  SimulationConfig cfg = build_simulation_config(cmd, args);
  if (cfg.data_path.empty()) throw ConfigError("data.path is required");
  const LabelSet labels;
  const std::vector<StreamInstance> data =
      ingest(cfg.data_path, labels, cfg.ingest);
  std::map<int, std::size_t> per_class;
  for (const StreamInstance& inst : data) ++per_class[inst.true_class];
  std::cout << data.size() << " instances kept (confidence > "
            << format_double(cfg.ingest.min_confidence) << ")\n";
  for (const auto& [cls, count] : per_class) {
    std::cout << "  " << labels.name_of(cls) << ": " << count << '\n';
  }
  std::cout << "fingerprint: " << to_hex(dataset_fingerprint(data)) << '\n';
  if (!cfg.output_dir.empty()) {
    write_text_file(cfg.output_dir, instances_to_jsonl(data, labels));
    std::cout << "normalized JSON lines in " << cfg.output_dir << '\n';
  }
  return 0;
}

int run_gen_synthetic(const CLI::App* cmd, const std::string& config_path,
                      const std::string& out, std::uint64_t seed, int segments,
                      int per_segment, int dwell, double dominant_share,
                      int tokens_per_class, int vocab_shift,
                      int tokens_per_instance, double noise_rate,
                      int noise_vocab) {
  if (!config_path.empty()) {
    const KeyValueConfig config = load_config(config_path);
    auto fill_long = [&](const char* flag, const char* key, int& slot) {
      if (cmd->count(flag) == 0) slot = static_cast<int>(config.get_long(key, slot));
    };
    fill_long("--segments", "synthetic.segments", segments);
    fill_long("--per-segment", "synthetic.per_segment", per_segment);
    fill_long("--dwell", "synthetic.dwell", dwell);
    fill_long("--tokens-per-class", "synthetic.tokens_per_class", tokens_per_class);
    fill_long("--vocab-shift", "synthetic.vocab_shift", vocab_shift);
    fill_long("--tokens-per-instance", "synthetic.tokens_per_instance",
              tokens_per_instance);
    fill_long("--noise-vocab", "synthetic.noise_vocab", noise_vocab);
    if (cmd->count("--dominant-share") == 0) {
      dominant_share = config.get_double("synthetic.dominant_share", dominant_share);
    }
    if (cmd->count("--noise-rate") == 0) {
      noise_rate = config.get_double("synthetic.noise_rate", noise_rate);
    }
    if (cmd->count("--seed") == 0) {
      seed = config.get_u64("seed.master", seed);
    }
  }

  DriftStreamSpec spec =
      default_drift_spec(segments, per_segment, dwell, dominant_share);
  spec.tokens_per_class = tokens_per_class;
  spec.vocab_shift = vocab_shift;
  spec.tokens_per_instance = tokens_per_instance;
  spec.noise_rate = noise_rate;
  spec.noise_vocab = noise_vocab;
  try {
    validate(spec);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("synthetic stream parameters: ") + e.what());
  }

  const LabelSet labels;
  const std::vector<StreamInstance> data = generate_drift_stream(spec, seed);
  const std::string jsonl = instances_to_jsonl(data, labels);
  if (out.empty()) {
    std::cout << jsonl;
    return 0;
  }
  write_text_file(out, jsonl);

  nlohmann::json manifest;
  manifest["command"] = "gen-synthetic";
  manifest["seed"] = seed;
  manifest["segments"] = segments;
  manifest["per_segment"] = per_segment;
  manifest["dwell"] = dwell;
  manifest["dominant_share"] = dominant_share;
  manifest["tokens_per_class"] = tokens_per_class;
  manifest["vocab_shift"] = vocab_shift;
  manifest["tokens_per_instance"] = tokens_per_instance;
  manifest["noise_rate"] = noise_rate;
  manifest["noise_vocab"] = noise_vocab;
  manifest["fingerprint"] = to_hex(dataset_fingerprint(data));
  manifest["code_version"] = kVersion;
  write_text_file(out + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << data.size() << " instances in " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annosim: stream annotation simulator with an error-aware "
               "human-in-the-loop oracle"};
  // Pin the program name so the --help text does not embed the build path.
  app.name("annosim");
  app.require_subcommand(1);
  // The top-level help expands every subcommand so one snapshot covers all
  // flags.
  app.set_help_flag();
  app.add_flag_callback(
      "-h,--help", [] { throw CLI::CallForAllHelp(); }, "Print this help");

  SimulateArgs sim_args;
  SimulateArgs cmp_args;
  SimulateArgs ingest_args;

  auto add_common = [](CLI::App* cmd, SimulateArgs& args) {
    cmd->add_option("--config", args.config_path,
                    "key=value config file with dotted keys; flags override");
    cmd->add_option("--seed", args.seed,
                    "Master seed; split/model/oracle/sampler seeds derive from "
                    "it by fixed offsets")
        ->capture_default_str();
    cmd->add_option("--out", args.out, "Output location");
  };

  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Load a dataset, filter by confidence, and "
                         "report per-class counts");
  add_common(ingest_cmd, ingest_args);
  add_simulation_flags(ingest_cmd, ingest_args);

  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Run the interval loop with one sampler policy");
  add_common(sim_cmd, sim_args);
  add_simulation_flags(sim_cmd, sim_args);
  sim_cmd->add_option("--replay", sim_args.replay_path,
                      "Re-run the configuration recorded in a manifest");

  std::string policies_csv = "random,uncertainty,error_avoidance";
  std::string decays_csv = "none";
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "Run several policies/decays on shared data and seeds");
  add_common(cmp_cmd, cmp_args);
  add_simulation_flags(cmp_cmd, cmp_args);
  cmp_cmd->add_option("--policies", policies_csv,
                      "Comma-separated sampler policies")
      ->capture_default_str();
  cmp_cmd->add_option("--decays", decays_csv,
                      "Comma-separated decay presets")
      ->capture_default_str();
  cmp_cmd->add_option("--replay", cmp_args.replay_path,
                      "Re-run the comparison recorded in a manifest");

  std::string sched_config;
  std::string sched_kind = "slip";
  std::string sched_data;
  std::string sched_out;
  std::uint64_t sched_seed = 1;
  std::size_t sched_length = 0;
  int sched_gap_min = 1;
  int sched_gap_max = 4;
  CLI::App* sched_cmd = app.add_subcommand(
      "schedule", "Emit an annotation schedule (slip, mistake, or lab stream)");
  sched_cmd->add_option("--config", sched_config,
                        "key=value config file with dotted keys; flags override");
  sched_cmd->add_option("--seed", sched_seed,
                        "Seed for lab-stream noise gaps")
      ->capture_default_str();
  sched_cmd->add_option("--out", sched_out, "Schedule JSON path (default stdout)");
  sched_cmd->add_option("--kind", sched_kind, "slip | mistake | lab")
      ->capture_default_str();
  sched_cmd->add_option("--data", sched_data,
                        "Draw schedule instances from this dataset instead of "
                        "placeholders");
  sched_cmd->add_option("--length", sched_length,
                        "Lab stream position cap (0 = one pass over the "
                        "ground truth)")
      ->capture_default_str();
  sched_cmd->add_option("--gap-min", sched_gap_min,
                        "Minimum noise gap between ground-truth instances")
      ->capture_default_str();
  sched_cmd->add_option("--gap-max", sched_gap_max,
                        "Maximum noise gap between ground-truth instances")
      ->capture_default_str();

  std::string analyze_config;
  std::string analyze_schedule;
  std::string analyze_responses;
  std::string analyze_test = "z";
  std::string analyze_out;
  std::string analyze_gap_out;
  std::uint64_t analyze_seed = 1;
  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "Position error rates and gap accuracy from judge responses");
  analyze_cmd->add_option("--config", analyze_config,
                          "key=value config file with dotted keys; flags "
                          "override");
  analyze_cmd->add_option("--seed", analyze_seed,
                          "Accepted for interface uniformity; this subcommand "
                          "draws no random numbers");
  analyze_cmd->add_option("--out", analyze_out, "Write the report as JSON here");
  analyze_cmd
      ->add_option("--schedule", analyze_schedule, "Schedule JSON to analyze")
      ->required();
  analyze_cmd
      ->add_option("--responses", analyze_responses,
                   "judge_id,position,label responses")
      ->required();
  analyze_cmd->add_option("--test", analyze_test,
                          "Significance test: z | binomial")
      ->capture_default_str();
  analyze_cmd->add_option("--gap-out", analyze_gap_out,
                          "Write the per-gap accuracy table here");

  std::string gen_config;
  std::string gen_out;
  std::uint64_t gen_seed = 1;
  int gen_segments = 28;
  int gen_per_segment = 45;
  int gen_dwell = 4;
  double gen_dominant_share = 0.7;
  int gen_tokens_per_class = 40;
  int gen_vocab_shift = 2;
  int gen_tokens_per_instance = 9;
  double gen_noise_rate = 0.30;
  int gen_noise_vocab = 60;
  CLI::App* gen_cmd = app.add_subcommand(
      "gen-synthetic", "Generate a drifting labeled stream as JSON lines");
  gen_cmd->add_option("--config", gen_config,
                      "key=value config file with dotted keys; flags override");
  gen_cmd->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output path (default stdout)");
  gen_cmd->add_option("--segments", gen_segments, "Number of drift segments")
      ->capture_default_str();
  gen_cmd->add_option("--per-segment", gen_per_segment,
                      "Instances per segment")
      ->capture_default_str();
  gen_cmd->add_option("--dwell", gen_dwell,
                      "Segments the dominant class holds before rotating")
      ->capture_default_str();
  gen_cmd->add_option("--dominant-share", gen_dominant_share,
                      "Probability mass of the dominant class")
      ->capture_default_str();
  gen_cmd->add_option("--tokens-per-class", gen_tokens_per_class,
                      "Sliding vocabulary window width per class")
      ->capture_default_str();
  gen_cmd->add_option("--vocab-shift", gen_vocab_shift,
                      "Vocabulary window shift per segment")
      ->capture_default_str();
  gen_cmd->add_option("--tokens-per-instance", gen_tokens_per_instance,
                      "Tokens per generated text")
      ->capture_default_str();
  gen_cmd->add_option("--noise-rate", gen_noise_rate,
                      "Per-token probability of a shared noise token")
      ->capture_default_str();
  gen_cmd->add_option("--noise-vocab", gen_noise_vocab,
                      "Size of the shared noise vocabulary")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ingest_cmd->parsed()) return run_ingest(ingest_cmd, ingest_args);
    if (sim_cmd->parsed()) return run_simulate(sim_cmd, sim_args);
    if (cmp_cmd->parsed()) {
      return run_compare(cmp_cmd, cmp_args, policies_csv, decays_csv);
    }
    if (sched_cmd->parsed()) {
      return run_schedule(sched_cmd, sched_config, sched_kind, sched_data,
                          sched_out, sched_seed, sched_length, sched_gap_min,
                          sched_gap_max);
    }
    if (analyze_cmd->parsed()) {
      return run_analyze(analyze_schedule, analyze_responses, analyze_test,
                         analyze_out, analyze_gap_out);
    }
    if (gen_cmd->parsed()) {
      return run_gen_synthetic(gen_cmd, gen_config, gen_out, gen_seed,
                               gen_segments, gen_per_segment, gen_dwell,
                               gen_dominant_share, gen_tokens_per_class,
                               gen_vocab_shift, gen_tokens_per_instance,
                               gen_noise_rate, gen_noise_vocab);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
