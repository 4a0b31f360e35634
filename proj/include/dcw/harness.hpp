#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dcw/core_model.hpp"
#include "dcw/quenched.hpp"

namespace dcw {

inline constexpr const char* kCodeVersion = "0.1.0";

enum class ExperimentKind {
  verify_expansions,
  verify_combinatorics,
  annealed_mean,
  annealed_variance,
  quenched_exact,
  quenched_mcmc,
  limits_table,
};

std::string kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

/// Parsed experiment description. The p rule is evaluated per grid N:
///   "const:V"     p = V
///   "power:A"     p = N^-A
///   "critline:C"  p = C^(-1/2) N^(-3/4), pinning p^4 N^3 = 1/C^2
///   "one"         p = 1
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::verify_expansions;
  std::vector<int> n_values;
  std::string p_rule = "one";
  std::vector<double> betas;
  Regime regime = Regime::high_temp;
  std::string g_id = "one";
  int replicas = 1;
  std::uint64_t master_seed = 0;
  ChainConfig chain;
  std::string out_dir = ".";
  std::string format = "both";  // csv | json | both
  int threads = 1;
  int n_guard = 400;
};

double eval_p_rule(const std::string& rule, int n);

/// Key-value config with [experiment], [grid], [chain] and [run] sections;
/// '#' starts a comment. Unknown sections or keys are errors. The schema is
/// documented in the README.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Every invariant violation in the config as a "field: problem" line;
/// empty means the config is runnable. Resource guards (the N caps of the
/// exact and O(N^3) paths) are reported here, before any work starts.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// FNV-1a 64-bit hash of a canonical serialization, printed as 16 hex
/// digits. Presentation fields (out_dir, format, threads) are excluded, so
/// the hash identifies the experiment itself.
std::string config_hash(const ExperimentConfig& cfg);

struct CellResult {
  std::string label;
  double value = 0.0;
  double reference = 0.0;
  bool has_check = false;
  bool pass = true;
};

struct RunRecord {
  std::string config_hash;
  std::string code_version;
  double wall_seconds = 0.0;
  std::vector<CellResult> cells;
  std::vector<std::string> output_files;
  bool all_pass = true;
};

/// Runs the configured grid and writes CSV/JSON (per cfg.format) under
/// cfg.out_dir. Output files embed the config hash and master seed in a
/// header comment line and contain no timestamps, so identical configs
/// produce byte-identical files. Throws std::invalid_argument carrying the
/// full violation list when validate_config rejects the config.
RunRecord run_experiment(const ExperimentConfig& cfg);

enum class VerifyLevel { quick, full };

struct VerifyCheck {
  std::string name;
  std::string group;  // expansions | combinatorics | laws | chains | annealed | quenched
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

struct VerifySummary {
  std::vector<VerifyCheck> checks;
  bool all_pass = true;
};

/// Built-in oracle checks. quick covers the exact small-N identities and
/// metric properties (target well under a minute); full adds the large-N
/// trend checks. a1_perturbation offsets the linear coefficient a1 inside
/// the closed form that the disorder-average identity check compares against
/// brute force; any nonzero value must make exactly that check fail, which
/// is how the suite's own sensitivity is probed.
VerifySummary verify_suite(VerifyLevel level, double a1_perturbation = 0.0,
                           int threads = 1);

void print_verify_summary(const VerifySummary& summary, std::ostream& os);

}  // namespace dcw
