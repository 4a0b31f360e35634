// Command-line driver for the dilute Curie-Weiss laboratory. Subcommands
// either load a full experiment config from an INI file (run) or assemble
// one from flags (annealed, quenched, limits). verify executes the built-in
// check suite; graph export dumps a sampled disorder realization.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dcw/core_model.hpp"
#include "dcw/harness.hpp"

namespace {

struct CommonFlags {
  std::string out;
  std::string format;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--out", flags.out, "output directory (default .)");
  cmd->add_option("--format", flags.format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_option("--threads", flags.threads, "worker threads (default 1)");
  cmd->add_option("--seed", flags.seed, "master seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
}

void apply_common(const CommonFlags& flags, dcw::ExperimentConfig& cfg) {
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  if (!flags.format.empty()) cfg.format = flags.format;
  if (flags.threads > 0) cfg.threads = flags.threads;
  if (flags.seed_set) {
    cfg.master_seed = flags.seed;
    cfg.chain.seed = flags.seed;
  }
}

struct GridFlags {
  std::vector<int> n;
  std::string p_rule = "one";
  std::vector<double> betas;
  std::string regime = "high-temp";
};

void add_grid(CLI::App* cmd, GridFlags& grid) {
  cmd->add_option("--n", grid.n, "system sizes")->required()->delimiter(',');
  cmd->add_option("--p", grid.p_rule,
                  "edge probability rule: one, const:V, power:A, critline:C");
  cmd->add_option("--beta", grid.betas, "inverse temperatures")
      ->required()
      ->delimiter(',');
  cmd->add_option("--regime", grid.regime,
                  "high-temp, crit-diverging, crit-line or crit-vanishing");
}

void apply_grid(const GridFlags& grid, dcw::ExperimentConfig& cfg) {
  cfg.n_values = grid.n;
  cfg.p_rule = grid.p_rule;
  cfg.betas = grid.betas;
  cfg.regime = dcw::regime_from_name(grid.regime);
}

int finish_run(dcw::ExperimentConfig cfg, const CommonFlags& common) {
  apply_common(common, cfg);
  const dcw::RunRecord record = dcw::run_experiment(cfg);
  std::cout << "config " << record.config_hash << " version "
            << record.code_version << "\n";
  std::cout << std::setprecision(10);
  for (const dcw::CellResult& cell : record.cells) {
    std::cout << "  " << cell.label << ": " << cell.value;
    if (cell.has_check)
      std::cout << (cell.pass ? " [pass]" : " [FAIL]");
    else if (cell.reference != 0.0)
      std::cout << " (reference " << cell.reference << ")";
    std::cout << "\n";
  }
  for (const std::string& file : record.output_files)
    std::cout << "wrote " << file << "\n";
  std::cout << std::fixed << std::setprecision(2) << record.wall_seconds
            << "s\n";
  return record.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dilute Curie-Weiss model laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dcw::kCodeVersion);

  CommonFlags common;
  GridFlags grid;
  std::string config_path;
  std::string verify_level = "quick";
  double mutate_a1 = 0.0;
  int verify_threads = 1;
  std::string g_id = "one";
  int n_guard = 400;
  int replicas = 1;
  dcw::ChainConfig chain;
  int graph_n = 0;
  double graph_p = 0.5;
  std::uint64_t graph_seed = 0;
  std::string graph_file = "-";

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("--config", config_path, "INI experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(run_cmd, common);

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the built-in check suite");
  verify_cmd->add_option("--level", verify_level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify_cmd->add_option("--threads", verify_threads, "worker threads");
  verify_cmd->add_option(
      "--mutate-a1", mutate_a1,
      "offset the tilt coefficient inside the disorder-average identity "
      "check; any nonzero value must make that check fail (self-test)");

  CLI::App* annealed_cmd =
      app.add_subcommand("annealed", "disorder-averaged tilted sums");
  CLI::App* annealed_mean_cmd =
      annealed_cmd->add_subcommand("mean", "log E Z vs prediction");
  CLI::App* annealed_var_cmd = annealed_cmd->add_subcommand(
      "variance", "log E Z^2 vs 2 log E Z (O(N^3) sum)");
  for (CLI::App* cmd : {annealed_mean_cmd, annealed_var_cmd}) {
    add_grid(cmd, grid);
    cmd->add_option("--g", g_id, "test function id");
    cmd->add_option("--n-guard", n_guard,
                    "largest N accepted by the second-moment sum");
    add_common(cmd, common);
  }
  annealed_cmd->require_subcommand(1);

  CLI::App* quenched_cmd =
      app.add_subcommand("quenched", "per-graph magnetization laws");
  CLI::App* quenched_exact_cmd = quenched_cmd->add_subcommand(
      "exact", "exact enumeration (N <= 24, or any N at p = 1)");
  CLI::App* quenched_mcmc_cmd =
      quenched_cmd->add_subcommand("mcmc", "heat-bath Glauber sampling");
  for (CLI::App* cmd : {quenched_exact_cmd, quenched_mcmc_cmd}) {
    add_grid(cmd, grid);
    cmd->add_option("--replicas", replicas, "independent graphs per cell");
    add_common(cmd, common);
  }
  quenched_mcmc_cmd->add_option("--sweeps", chain.sweeps, "full-lattice sweeps")
      ->required();
  quenched_mcmc_cmd->add_option("--burn-in", chain.burn_in,
                                "discarded sweeps (default 10 N)");
  quenched_mcmc_cmd->add_option("--thinning", chain.thinning,
                                "record every k-th sweep");
  quenched_cmd->require_subcommand(1);

  CLI::App* limits_cmd = app.add_subcommand("limits", "limit laws");
  CLI::App* limits_pdf_cmd =
      limits_cmd->add_subcommand("pdf", "tabulate the predicted limit law");
  add_grid(limits_pdf_cmd, grid);
  add_common(limits_pdf_cmd, common);
  limits_cmd->require_subcommand(1);

  CLI::App* graph_cmd = app.add_subcommand("graph", "disorder realizations");
  CLI::App* graph_export_cmd =
      graph_cmd->add_subcommand("export", "sample a graph and dump its edges");
  graph_export_cmd->add_option("--n", graph_n, "number of sites")->required();
  graph_export_cmd->add_option("--p", graph_p, "edge probability");
  graph_export_cmd->add_option("--seed", graph_seed, "graph seed");
  graph_export_cmd->add_option("--file", graph_file,
                               "output path, - for stdout");
  graph_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(run_cmd))
      return finish_run(dcw::load_config(config_path), common);

    if (app.got_subcommand(verify_cmd)) {
      const dcw::VerifyLevel level = verify_level == "full"
                                         ? dcw::VerifyLevel::full
                                         : dcw::VerifyLevel::quick;
      const dcw::VerifySummary summary =
          dcw::verify_suite(level, mutate_a1, verify_threads);
      dcw::print_verify_summary(summary, std::cout);
      return summary.all_pass ? 0 : 1;
    }

    if (app.got_subcommand(annealed_cmd)) {
      dcw::ExperimentConfig cfg;
      cfg.kind = annealed_cmd->got_subcommand(annealed_mean_cmd)
                     ? dcw::ExperimentKind::annealed_mean
                     : dcw::ExperimentKind::annealed_variance;
      apply_grid(grid, cfg);
      cfg.g_id = g_id;
      cfg.n_guard = n_guard;
      return finish_run(std::move(cfg), common);
    }

    if (app.got_subcommand(quenched_cmd)) {
      dcw::ExperimentConfig cfg;
      cfg.kind = quenched_cmd->got_subcommand(quenched_exact_cmd)
                     ? dcw::ExperimentKind::quenched_exact
                     : dcw::ExperimentKind::quenched_mcmc;
      apply_grid(grid, cfg);
      cfg.replicas = replicas;
      cfg.chain = chain;
      return finish_run(std::move(cfg), common);
    }

    if (app.got_subcommand(limits_cmd)) {
      dcw::ExperimentConfig cfg;
      cfg.kind = dcw::ExperimentKind::limits_table;
      apply_grid(grid, cfg);
      return finish_run(std::move(cfg), common);
    }

    if (app.got_subcommand(graph_cmd)) {
      const dcw::ModelParams params(graph_n, graph_p, 0.0);
      const dcw::DisorderGraph graph(params, graph_seed);
      if (graph_file == "-") {
        graph.write_edges(std::cout);
      } else {
        std::ofstream os(graph_file);
        if (!os)
          throw std::runtime_error("cannot write " + graph_file);
        graph.write_edges(os);
        std::cout << "wrote " << graph_file << " (" << graph.edge_count()
                  << " edges)\n";
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
