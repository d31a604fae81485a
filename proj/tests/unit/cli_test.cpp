// Drives the annosim binary end to end through a shell: exit codes, help
// snapshot, artifact writing, replay, and flag/config precedence.
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "annosim/util.hpp"

namespace {

namespace fs = std::filesystem;
using annosim::strf;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_root() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / "annosim_cli_work";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open ", p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Runs the binary with stdout/stderr captured to files. env_prefix lets a
// test pin ANNOSIM_OUT_ROOT without leaking into other cases.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path out_file = work_root() / strf("stdout-%03d.txt", counter);
  const fs::path err_file = work_root() / strf("stderr-%03d.txt", counter);
  ++counter;

  std::string cmd = env_prefix;
  if (!cmd.empty()) cmd += ' ';
  cmd += "\"" ANNOSIM_CLI_PATH "\" " + args + " >" + out_file.string() + " 2>" +
         err_file.string();
  const int status = std::system(cmd.c_str());

  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

fs::path case_dir(const std::string& name) {
  const fs::path dir = work_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << content;
}

// Small separable stream shared by the heavier cases; generated once through
// the CLI itself.
const fs::path& shared_data() {
  static const fs::path path = [] {
    const fs::path dir = case_dir("shared_data");
    const fs::path p = dir / "stream.jsonl";
    const CliResult r = run_cli(
        "gen-synthetic --seed 5 --segments 4 --per-segment 30 "
        "--tokens-per-class 6 --vocab-shift 0 --tokens-per-instance 5 "
        "--noise-rate 0.1 --out " +
        p.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    return p;
  }();
  return path;
}

constexpr const char* kSimFlags =
    " --bin-size 12 --warmup 3 --feature-dim 64 ";

}  // namespace

TEST_CASE("top-level help matches the snapshot") {
  const CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());

  // The help flag expands every subcommand, so the one snapshot pins all
  // documented flags.
  CHECK(r.out.find("simulate") != std::string::npos);
  CHECK(r.out.find("gen-synthetic") != std::string::npos);
  CHECK(r.out.find("--band-low") != std::string::npos);
  CHECK(r.out.find("--replay") != std::string::npos);

  const std::string expected = slurp(fs::path(ANNOSIM_HELP_SNAPSHOT));
  CHECK_MESSAGE(r.out == expected,
                "help output drifted from tests/data/help_snapshot.txt");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("simulate --no-such-flag").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);

  const CliResult r = run_cli("");
  CHECK(!r.err.empty());
}

TEST_CASE("config errors exit with code 2 and name the field") {
  const fs::path dir = case_dir("config_errors");

  SUBCASE("unknown key") {
    const fs::path cfg = dir / "unknown.conf";
    write_file(cfg, "bogus.key = 1\n");
    const CliResult r = run_cli("simulate --config " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
    CHECK(r.err.find("bogus.key") != std::string::npos);
  }
  SUBCASE("invalid value") {
    const fs::path cfg = dir / "badvalue.conf";
    write_file(cfg, "split.test_fraction = 1.5\n");
    const CliResult r = run_cli("simulate --config " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("split.test_fraction must be in (0, 1)") !=
          std::string::npos);
  }
  SUBCASE("unparseable value") {
    const fs::path cfg = dir / "badint.conf";
    write_file(cfg, "split.bin_size = twelve\n");
    const CliResult r = run_cli("simulate --config " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("split.bin_size") != std::string::npos);
    CHECK(r.err.find("twelve") != std::string::npos);
  }
  SUBCASE("flag value fails validation") {
    const CliResult r = run_cli("simulate --band-low 0.9 --band-high 0.1");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("sampler.band_low") != std::string::npos);
  }
}

TEST_CASE("a missing input file exits with code 3 and writes nothing") {
  const fs::path dir = case_dir("missing_input");
  const fs::path out_dir = dir / "out";
  const CliResult r = run_cli("simulate --data " + (dir / "nope.jsonl").string() +
                              " --out " + out_dir.string());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("input error") != std::string::npos);
  CHECK_FALSE(fs::exists(out_dir));
}

TEST_CASE("gen-synthetic is deterministic per seed and records a manifest") {
  const fs::path dir = case_dir("gen_synthetic");
  const std::string flags = "gen-synthetic --segments 4 --per-segment 10 --out ";

  const fs::path a = dir / "a.jsonl";
  const fs::path b = dir / "b.jsonl";
  const fs::path c = dir / "c.jsonl";
  CHECK(run_cli(flags + a.string() + " --seed 5").exit_code == 0);
  CHECK(run_cli(flags + b.string() + " --seed 5").exit_code == 0);
  CHECK(run_cli(flags + c.string() + " --seed 6").exit_code == 0);

  const std::string bytes_a = slurp(a);
  CHECK(bytes_a == slurp(b));
  CHECK(bytes_a != slurp(c));
  CHECK(line_count(bytes_a) == 40);

  const auto manifest = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
  CHECK(manifest.at("command") == "gen-synthetic");
  CHECK(manifest.at("seed") == 5);
  CHECK(manifest.at("per_segment") == 10);
  CHECK(!manifest.at("fingerprint").get<std::string>().empty());

  SUBCASE("invalid spec exits 2") {
    const fs::path bad = dir / "bad.jsonl";
    const CliResult r = run_cli("gen-synthetic --noise-rate 1.5 --out " + bad.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("synthetic stream parameters") != std::string::npos);
    CHECK_FALSE(fs::exists(bad));
  }
}

TEST_CASE("ingest reports per-class counts and normalizes losslessly") {
  const fs::path dir = case_dir("ingest");
  const CliResult r = run_cli("ingest --data " + shared_data().string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("120 instances kept") != std::string::npos);
  CHECK(r.out.find("fingerprint: ") != std::string::npos);
  CHECK(r.out.find("rescue_volunteering_donation") != std::string::npos);

  // All generated confidences are exactly 1.0 and the filter is strict.
  const CliResult none =
      run_cli("ingest --data " + shared_data().string() + " --min-confidence 1");
  CHECK(none.exit_code == 0);
  CHECK(none.out.find("0 instances kept") != std::string::npos);

  const fs::path norm = dir / "normalized.jsonl";
  const CliResult w = run_cli("ingest --data " + shared_data().string() +
                              " --out " + norm.string());
  CHECK(w.exit_code == 0);
  CHECK(slurp(norm) == slurp(shared_data()));
}

TEST_CASE("simulate writes artifacts and replay reproduces them") {
  const fs::path dir = case_dir("simulate");
  const fs::path run_a = dir / "runA";
  const CliResult r = run_cli("simulate --data " + shared_data().string() +
                              kSimFlags +
                              "--policy error_avoidance --decay fast --seed 9 "
                              "--out " +
                              run_a.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.out.find("interval 1:") != std::string::npos);
  CHECK(r.out.find("interval 7:") != std::string::npos);
  CHECK(r.out.find("run artifacts in " + run_a.string()) != std::string::npos);

  for (const char* name :
       {"manifest.json", "metrics.csv", "scores.csv", "annotations.csv"}) {
    CHECK_MESSAGE(fs::exists(run_a / name), name);
  }

  const auto manifest = nlohmann::json::parse(slurp(run_a / "manifest.json"));
  const auto& config = manifest.at("config");
  CHECK(config.at("sampler.policy") == "error_avoidance");
  CHECK(config.at("oracle.preset") == "fast");
  CHECK(config.at("seed.master") == "9");
  CHECK(config.at("seed.sampler") == "13");
  CHECK(config.at("split.bin_size") == "12");
  CHECK(!manifest.at("config_hash").get<std::string>().empty());
  CHECK(!manifest.at("dataset_fingerprint").get<std::string>().empty());

  const fs::path run_b = dir / "runB";
  const CliResult replay =
      run_cli("simulate --replay " + (run_a / "manifest.json").string() +
              " --out " + run_b.string());
  REQUIRE_MESSAGE(replay.exit_code == 0, replay.err);
  for (const char* name : {"metrics.csv", "scores.csv", "annotations.csv"}) {
    CHECK_MESSAGE(slurp(run_a / name) == slurp(run_b / name), name);
  }
}

TEST_CASE("flags override config file values") {
  const fs::path dir = case_dir("precedence");
  const fs::path cfg = dir / "run.conf";
  write_file(cfg, "data.path = " + shared_data().string() +
                      "\n"
                      "sampler.policy = random\n"
                      "seed.master = 5\n"
                      "oracle.seed = 99\n"
                      "split.bin_size = 12\n"
                      "split.n_warmup = 3\n"
                      "classifier.dim = 64\n");

  const fs::path out = dir / "run";
  const CliResult r = run_cli("simulate --config " + cfg.string() +
                              " --policy uncertainty --out " + out.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  const auto& config = manifest.at("config");
  CHECK(config.at("sampler.policy") == "uncertainty");  // flag wins
  CHECK(config.at("split.bin_size") == "12");           // file survives
  CHECK(config.at("seed.master") == "5");
  CHECK(config.at("seed.split") == "6");   // derived from master
  CHECK(config.at("seed.oracle") == "99");  // explicit alias wins
}

TEST_CASE("simulate without an output location stays on stdout") {
  const fs::path dir = case_dir("out_root");
  const CliResult quiet =
      run_cli("simulate --data " + shared_data().string() + kSimFlags,
              "ANNOSIM_OUT_ROOT=");
  REQUIRE_MESSAGE(quiet.exit_code == 0, quiet.err);
  CHECK(quiet.out.find("interval 1:") != std::string::npos);
  CHECK(quiet.out.find("run artifacts in") == std::string::npos);

  const CliResult rooted =
      run_cli("simulate --data " + shared_data().string() + kSimFlags,
              "ANNOSIM_OUT_ROOT=" + dir.string());
  REQUIRE_MESSAGE(rooted.exit_code == 0, rooted.err);
  CHECK(rooted.out.find("run artifacts in") != std::string::npos);
  bool found_run_dir = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().filename().string().rfind("run-", 0) == 0) {
      found_run_dir = true;
      CHECK(fs::exists(entry.path() / "metrics.csv"));
    }
  }
  CHECK(found_run_dir);
}

TEST_CASE("compare writes an aligned comparison table") {
  const fs::path dir = case_dir("compare");
  const fs::path out = dir / "cmp";
  const CliResult r = run_cli("compare --data " + shared_data().string() +
                              kSimFlags +
                              "--policies random,uncertainty --decays none "
                              "--seed 9 --out " +
                              out.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.out.find("comparison in " + out.string()) != std::string::npos);
  CHECK(r.out.find("random_none: mean macro AUC") != std::string::npos);
  CHECK(r.out.find("uncertainty_none: mean macro AUC") != std::string::npos);

  const std::string csv = slurp(out / "comparison.csv");
  CHECK(csv.rfind("run_id,policy,decay,interval,metric,value\n", 0) == 0);

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("config").at("compare.policies") == "random,uncertainty");
  CHECK(manifest.at("config").at("compare.decays") == "none");

  SUBCASE("an empty policy list is a config error") {
    const CliResult bad = run_cli("compare --data " + shared_data().string() +
                                  " --policies , --decays none");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("at least one policy") != std::string::npos);
  }
}

TEST_CASE("schedule emits valid schedule JSON with a manifest sidecar") {
  const fs::path dir = case_dir("schedule");

  SUBCASE("slip") {
    const fs::path out = dir / "slip.json";
    const CliResult r = run_cli("schedule --kind slip --out " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("schedule (20 positions)") != std::string::npos);

    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("kind") == "slip");
    CHECK(j.at("target_class") == "affected_individuals");
    CHECK(j.at("target_positions") == nlohmann::json({4, 6, 20}));
    REQUIRE(j.at("entries").size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(j.at("entries")[i].at("position") == static_cast<int>(i) + 1);
    }
    CHECK(fs::exists(out.string() + ".manifest.json"));
  }

  SUBCASE("mistake") {
    const fs::path out = dir / "mistake.json";
    REQUIRE(run_cli("schedule --kind mistake --out " + out.string()).exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("kind") == "mistake");
    CHECK(j.at("target_positions") == nlohmann::json({9, 13, 17}));
  }

  SUBCASE("lab stream honors the length cap deterministically") {
    const fs::path a = dir / "lab_a.json";
    const fs::path b = dir / "lab_b.json";
    const std::string flags =
        "schedule --kind lab --length 30 --seed 3 --gap-min 2 --gap-max 5 --out ";
    REQUIRE(run_cli(flags + a.string()).exit_code == 0);
    REQUIRE(run_cli(flags + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    const auto j = nlohmann::json::parse(slurp(a));
    CHECK(j.at("kind") == "lab");
    CHECK(j.at("entries").size() <= 30);
    CHECK(j.at("entries").size() > 10);
  }

  SUBCASE("unknown kind exits 2") {
    CHECK(run_cli("schedule --kind banana").exit_code == 2);
  }
}

TEST_CASE("analyze recovers the position error rates and p-values") {
  const fs::path dir = case_dir("analyze");
  const fs::path sched = dir / "sched.json";
  REQUIRE(run_cli("schedule --kind slip --out " + sched.string()).exit_code == 0);
  const auto schedule = nlohmann::json::parse(slurp(sched));

  // Ten judges answer the scheduled class everywhere except planted errors at
  // the three target positions: 3/10, 2/10, and 5/10 wrong.
  std::ostringstream csv;
  csv << "judge_id,position,label\n";
  for (int judge = 1; judge <= 10; ++judge) {
    for (const auto& entry : schedule.at("entries")) {
      const int pos = entry.at("position").get<int>();
      std::string label = entry.at("class").get<std::string>();
      const bool flip = (pos == 4 && judge <= 3) || (pos == 6 && judge <= 2) ||
                        (pos == 20 && judge <= 5);
      if (flip) label = "infrastructure_and_utility_damage";
      csv << strf("j%02d", judge) << ',' << pos << ',' << label << '\n';
    }
  }
  const fs::path resp = dir / "responses.csv";
  write_file(resp, csv.str());

  const fs::path report_path = dir / "report.json";
  const fs::path gap_path = dir / "gaps.csv";
  const CliResult r = run_cli("analyze --schedule " + sched.string() +
                              " --responses " + resp.string() + " --out " +
                              report_path.string() + " --gap-out " +
                              gap_path.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.out.find("target class: affected_individuals") != std::string::npos);
  CHECK(r.out.find("position 4: error rate 0.3000 (3/10)") != std::string::npos);
  CHECK(r.out.find("p-value (z test)") != std::string::npos);

  const auto report = nlohmann::json::parse(slurp(report_path));
  CHECK(report.at("judges") == 10);
  CHECK(report.at("positions") == nlohmann::json({4, 6, 20}));
  CHECK(report.at("error_counts") == nlohmann::json({3, 2, 5}));
  CHECK(report.at("responses_per_position") == 10);
  CHECK(report.at("test") == "z");
  CHECK(report.at("p_value").get<double>() ==
        doctest::Approx(0.17090352023079758).epsilon(1e-9));

  CHECK(slurp(gap_path).rfind("class,gap_steps,correct,total\n", 0) == 0);

  SUBCASE("exact binomial alternative") {
    const fs::path report2 = dir / "report2.json";
    const CliResult rb = run_cli("analyze --schedule " + sched.string() +
                                 " --responses " + resp.string() +
                                 " --test binomial --out " + report2.string());
    REQUIRE_MESSAGE(rb.exit_code == 0, rb.err);
    const auto j = nlohmann::json::parse(slurp(report2));
    CHECK(j.at("test") == "binomial");
    CHECK(j.at("p_value").get<double>() ==
          doctest::Approx(0.13444042205810533).epsilon(1e-9));
  }
  SUBCASE("unknown test name exits 2") {
    const CliResult bad = run_cli("analyze --schedule " + sched.string() +
                                  " --responses " + resp.string() +
                                  " --test chi");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("unknown significance test") != std::string::npos);
  }
  SUBCASE("missing required option exits 2") {
    CHECK(run_cli("analyze --responses " + resp.string()).exit_code == 2);
  }
  SUBCASE("missing schedule file exits 3") {
    const CliResult bad = run_cli("analyze --schedule " +
                                  (dir / "nope.json").string() +
                                  " --responses " + resp.string());
    CHECK(bad.exit_code == 3);
  }
}
