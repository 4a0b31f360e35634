#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"

#include "dcw/harness.hpp"

using namespace dcw;

namespace {

const char* kSampleConfig = R"(# annealed mean sweep
[experiment]
kind = annealed-mean   # identity check grid
g = gauss
replicas = 3
seed = 42

[grid]
n = 20, 40
p = const:0.5
beta = 0.0, 0.5

[run]
out = ./out
format = csv
threads = 2
)";

ExperimentConfig parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parsing round trips all sections") {
  const ExperimentConfig cfg = parse_string(kSampleConfig);
  CHECK(cfg.kind == ExperimentKind::annealed_mean);
  CHECK(cfg.g_id == "gauss");
  CHECK(cfg.replicas == 3);
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.n_values == std::vector<int>{20, 40});
  CHECK(cfg.p_rule == "const:0.5");
  CHECK(cfg.betas == std::vector<double>{0.0, 0.5});
  CHECK(cfg.out_dir == "./out");
  CHECK(cfg.format == "csv");
  CHECK(cfg.threads == 2);
  CHECK(cfg.chain.seed == 42);

  const ExperimentConfig chained = parse_string(
      "[experiment]\nkind = quenched-mcmc\nregime = high-temp\nseed = 9\n"
      "[grid]\nn = 12\np = const:0.5\nbeta = 0.5\n"
      "[chain]\nsweeps = 100\nburn_in = 10\nthinning = 2\n");
  CHECK(chained.kind == ExperimentKind::quenched_mcmc);
  CHECK(chained.chain.sweeps == 100);
  CHECK(chained.chain.burn_in == 10);
  CHECK(chained.chain.thinning == 2);
}

TEST_CASE("config parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_string("[experiment]\nkind = annealed-mean\n"
                               "kind = annealed-mean\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_string("[nope]\nx = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_string("[experiment]\nflavor = blue\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_string("kind = annealed-mean\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_string("[experiment\nkind = annealed-mean\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_string("[experiment]\nkind = annealed-mean\n"
                               "[grid]\nn = 1x\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_string("[grid]\nn = 10\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_string("[experiment]\nkind = tropical\n"),
                  std::invalid_argument);
}

TEST_CASE("p rules evaluate per grid size") {
  CHECK(eval_p_rule("one", 999) == 1.0);
  CHECK(eval_p_rule("const:0.25", 10) == 0.25);
  CHECK(eval_p_rule("power:0.5", 16) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eval_p_rule("critline:4", 16) ==
        doctest::Approx(0.0625).epsilon(1e-15));
  CHECK_THROWS_AS(eval_p_rule("weird", 10), std::invalid_argument);
  CHECK_THROWS_AS(eval_p_rule("const:zero", 10), std::invalid_argument);
}

TEST_CASE("config validation reports each violated invariant") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::annealed_mean;
  cfg.n_values = {20, 40};
  cfg.p_rule = "const:0.5";
  cfg.betas = {0.0, 0.5};
  cfg.g_id = "gauss";
  CHECK(validate_config(cfg).empty());

  ExperimentConfig bad = cfg;
  bad.n_values.clear();
  bad.betas = {1.5};
  bad.g_id = "nope";
  bad.format = "xml";
  const std::vector<std::string> problems = validate_config(bad);
  std::string joined;
  for (const std::string& s : problems) joined += s + "\n";
  CHECK(joined.find("grid.n") != std::string::npos);
  CHECK(joined.find("beta") != std::string::npos);
  CHECK(joined.find("experiment.g") != std::string::npos);
  CHECK(joined.find("format") != std::string::npos);

  ExperimentConfig exact = cfg;
  exact.kind = ExperimentKind::quenched_exact;
  exact.regime = Regime::high_temp;
  exact.betas = {0.5};
  exact.n_values = {30};
  exact.replicas = 0;
  std::string exact_joined;
  for (const std::string& s : validate_config(exact)) exact_joined += s + "\n";
  CHECK(exact_joined.find("24") != std::string::npos);
  CHECK(exact_joined.find("replicas") != std::string::npos);
  exact.p_rule = "one";
  exact.replicas = 4;
  CHECK(validate_config(exact).empty());

  ExperimentConfig mismatched = cfg;
  mismatched.kind = ExperimentKind::quenched_exact;
  mismatched.n_values = {12};
  mismatched.regime = Regime::crit_diverging;
  mismatched.betas = {0.5};
  CHECK(!validate_config(mismatched).empty());
}

TEST_CASE("config hash covers substance and ignores presentation") {
  const ExperimentConfig cfg = parse_string(kSampleConfig);
  const std::string h = config_hash(cfg);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);

  ExperimentConfig other = cfg;
  other.master_seed = 43;
  CHECK(config_hash(other) != h);
  other = cfg;
  other.kind = ExperimentKind::annealed_variance;
  CHECK(config_hash(other) != h);
  other = cfg;
  other.betas.push_back(0.9);
  CHECK(config_hash(other) != h);

  other = cfg;
  other.out_dir = "/elsewhere";
  other.format = "json";
  other.threads = 7;
  CHECK(config_hash(other) == h);
}

TEST_CASE("run experiment writes deterministic tagged outputs") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "dcw_harness_test";
  std::filesystem::remove_all(dir);

  ExperimentConfig cfg = parse_string(kSampleConfig);
  cfg.out_dir = dir.string();
  cfg.format = "both";
  const RunRecord rec = run_experiment(cfg);
  CHECK(rec.all_pass);
  CHECK(rec.config_hash == config_hash(cfg));
  REQUIRE(rec.output_files.size() == 2);
  for (const std::string& f : rec.output_files)
    CHECK(std::filesystem::exists(f));

  const std::string csv = read_file(rec.output_files[0]);
  CHECK(csv.find(rec.config_hash) != std::string::npos);
  CHECK(csv.find("N,p,beta,") != std::string::npos);
  // Header comment + column line + one row per (N, beta) cell.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 4);

  const RunRecord rerun = run_experiment(cfg);
  CHECK(read_file(rerun.output_files[0]) == csv);
  CHECK(read_file(rerun.output_files[1]) ==
        read_file(rec.output_files[1]));

  ExperimentConfig bad = cfg;
  bad.betas = {2.0};
  bad.replicas = -1;
  try {
    run_experiment(bad);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("  - ") != std::string::npos);
    CHECK(msg.find("beta") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify suite runs clean and the mutation probe trips one check") {
  const VerifySummary ok = verify_suite(VerifyLevel::quick);
  CHECK(ok.all_pass);
  CHECK(ok.checks.size() >= 20);
  std::set<std::string> groups;
  for (const VerifyCheck& c : ok.checks) groups.insert(c.group);
  CHECK(groups == std::set<std::string>{"expansions", "combinatorics", "laws",
                                        "chains", "annealed", "quenched"});

  const VerifySummary mutated = verify_suite(VerifyLevel::quick, 1e-6);
  CHECK(!mutated.all_pass);
  std::set<std::string> failing;
  for (const VerifyCheck& c : mutated.checks)
    if (!c.pass) failing.insert(c.name);
  CHECK(failing == std::set<std::string>{"expected-t-identity"});

  std::ostringstream os;
  print_verify_summary(mutated, os);
  CHECK(os.str().find("[FAIL] expected-t-identity") != std::string::npos);
}

TEST_CASE("experiment kind names round trip") {
  for (ExperimentKind k :
       {ExperimentKind::verify_expansions, ExperimentKind::verify_combinatorics,
        ExperimentKind::annealed_mean, ExperimentKind::annealed_variance,
        ExperimentKind::quenched_exact, ExperimentKind::quenched_mcmc,
        ExperimentKind::limits_table})
    CHECK(kind_from_name(kind_name(k)) == k);
  CHECK_THROWS_AS(kind_from_name("verify"), std::invalid_argument);
}
