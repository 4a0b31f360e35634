#include "dcw/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "dcw/annealed.hpp"
#include "dcw/combinatorics.hpp"
#include "dcw/expansions.hpp"
#include "dcw/limits_stats.hpp"
#include "dcw/numerics.hpp"
#include "dcw/rng.hpp"

namespace dcw {

namespace {

using nlohmann::json;

constexpr double kLog2 = 0.6931471805599453094;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size() && std::isfinite(v)) return v;
  } catch (...) {
  }
  throw std::invalid_argument(where + ": cannot parse number \"" + s + "\"");
}

long long parse_ll(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos == s.size()) return v;
  } catch (...) {
  }
  throw std::invalid_argument(where + ": cannot parse integer \"" + s + "\"");
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size()) return v;
  } catch (...) {
  }
  throw std::invalid_argument(where +
                              ": cannot parse unsigned integer \"" + s + "\"");
}

// Canonical number text used by the config hash.
std::string fmt_full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

ScalingRule scale_for(Regime regime) {
  switch (regime) {
    case Regime::high_temp:
      return ScalingRule::sqrt_n;
    case Regime::crit_diverging:
    case Regime::crit_line:
      return ScalingRule::n34;
    case Regime::crit_vanishing:
      return ScalingRule::n32p;
  }
  throw std::logic_error("scale_for: bad regime");
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool kind_uses_grid(ExperimentKind k) {
  return k != ExperimentKind::verify_expansions &&
         k != ExperimentKind::verify_combinatorics;
}

bool kind_is_annealed(ExperimentKind k) {
  return k == ExperimentKind::annealed_mean ||
         k == ExperimentKind::annealed_variance;
}

bool kind_is_quenched(ExperimentKind k) {
  return k == ExperimentKind::quenched_exact ||
         k == ExperimentKind::quenched_mcmc;
}

}  // namespace

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::verify_expansions:
      return "verify-expansions";
    case ExperimentKind::verify_combinatorics:
      return "verify-combinatorics";
    case ExperimentKind::annealed_mean:
      return "annealed-mean";
    case ExperimentKind::annealed_variance:
      return "annealed-variance";
    case ExperimentKind::quenched_exact:
      return "quenched-exact";
    case ExperimentKind::quenched_mcmc:
      return "quenched-mcmc";
    case ExperimentKind::limits_table:
      return "limits-table";
  }
  return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
  static const std::map<std::string, ExperimentKind> table = {
      {"verify-expansions", ExperimentKind::verify_expansions},
      {"verify-combinatorics", ExperimentKind::verify_combinatorics},
      {"annealed-mean", ExperimentKind::annealed_mean},
      {"annealed-variance", ExperimentKind::annealed_variance},
      {"quenched-exact", ExperimentKind::quenched_exact},
      {"quenched-mcmc", ExperimentKind::quenched_mcmc},
      {"limits-table", ExperimentKind::limits_table},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [k, v] : table) known += " " + k;
    throw std::invalid_argument("unknown experiment kind \"" + name +
                                "\"; known kinds:" + known);
  }
  return it->second;
}

double eval_p_rule(const std::string& rule, int n) {
  if (rule == "one") return 1.0;
  const size_t colon = rule.find(':');
  if (colon != std::string::npos) {
    const std::string head = rule.substr(0, colon);
    const double arg = parse_double(rule.substr(colon + 1), "p rule");
    if (head == "const") return arg;
    if (head == "power") return std::pow(static_cast<double>(n), -arg);
    if (head == "critline")
      return std::pow(arg, -0.5) * std::pow(static_cast<double>(n), -0.75);
  }
  throw std::invalid_argument(
      "p rule \"" + rule +
      "\" not understood; want one, const:V, power:A or critline:C");
}

ExperimentConfig parse_config(std::istream& in) {
  static const std::vector<std::string> known_sections = {"experiment", "grid",
                                                          "chain", "run"};
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = "config line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(at + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(known_sections.begin(), known_sections.end(), section) ==
          known_sections.end())
        throw std::invalid_argument(at + ": unknown section [" + section +
                                    "]");
      sections[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(at + ": expected key = value");
    if (section.empty())
      throw std::invalid_argument(at + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(at + ": empty key");
    if (sections[section].count(key))
      throw std::invalid_argument(at + ": duplicate key \"" + key + "\"");
    sections[section][key] = value;
  }

  const auto take = [&sections](const std::string& sec, const std::string& key,
                                std::string* out) {
    const auto sit = sections.find(sec);
    if (sit == sections.end()) return false;
    const auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return false;
    *out = kit->second;
    sit->second.erase(kit);
    return true;
  };

  ExperimentConfig cfg;
  std::string v;
  if (!take("experiment", "kind", &v))
    throw std::invalid_argument("config: [experiment] kind is required");
  cfg.kind = kind_from_name(v);
  if (take("experiment", "regime", &v)) cfg.regime = regime_from_name(v);
  if (take("experiment", "g", &v)) cfg.g_id = v;
  if (take("experiment", "replicas", &v))
    cfg.replicas = static_cast<int>(parse_ll(v, "[experiment] replicas"));
  if (take("experiment", "seed", &v))
    cfg.master_seed = parse_u64(v, "[experiment] seed");

  if (take("grid", "n", &v)) {
    for (const std::string& tok : split_list(v)) {
      const long long n = parse_ll(tok, "[grid] n");
      if (n < 1 || n > 1000000000)
        throw std::invalid_argument("[grid] n: value " + tok +
                                    " outside 1..1e9");
      cfg.n_values.push_back(static_cast<int>(n));
    }
  }
  if (take("grid", "p", &v)) cfg.p_rule = v;
  if (take("grid", "beta", &v)) {
    for (const std::string& tok : split_list(v))
      cfg.betas.push_back(parse_double(tok, "[grid] beta"));
  }

  if (take("chain", "sweeps", &v))
    cfg.chain.sweeps = parse_ll(v, "[chain] sweeps");
  if (take("chain", "burn_in", &v))
    cfg.chain.burn_in = parse_ll(v, "[chain] burn_in");
  if (take("chain", "thinning", &v))
    cfg.chain.thinning = parse_ll(v, "[chain] thinning");

  if (take("run", "out", &v)) cfg.out_dir = v;
  if (take("run", "format", &v)) cfg.format = v;
  if (take("run", "threads", &v))
    cfg.threads = static_cast<int>(parse_ll(v, "[run] threads"));
  if (take("run", "n_guard", &v))
    cfg.n_guard = static_cast<int>(parse_ll(v, "[run] n_guard"));

  for (const auto& [sec, keys] : sections) {
    if (!keys.empty())
      throw std::invalid_argument("config: unknown key \"" +
                                  keys.begin()->first + "\" in section [" +
                                  sec + "]");
  }
  cfg.chain.seed = cfg.master_seed;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  return parse_config(in);
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> v;
  const auto add = [&v](const std::string& msg) {
    if (std::find(v.begin(), v.end(), msg) == v.end()) v.push_back(msg);
  };

  if (kind_uses_grid(cfg.kind)) {
    if (cfg.n_values.empty()) add("grid.n: at least one N is required");
    for (int n : cfg.n_values)
      if (n < 1) add("grid.n: N=" + std::to_string(n) + " must be >= 1");
    if (cfg.betas.empty()) add("grid.beta: at least one beta is required");
    for (double beta : cfg.betas) {
      if (!(beta >= 0.0 && beta <= 1.0) || !std::isfinite(beta))
        add("grid.beta: beta=" + fmt_full(beta) +
            " outside the supported range [0, 1]");
    }
    bool rule_ok = true;
    for (int n : cfg.n_values) {
      if (n < 1) continue;
      try {
        const double p = eval_p_rule(cfg.p_rule, n);
        if (!(p > 0.0 && p <= 1.0))
          add("grid.p: rule " + cfg.p_rule + " gives p=" + fmt_full(p) +
              " outside (0, 1] at N=" + std::to_string(n));
      } catch (const std::exception& e) {
        if (rule_ok) add(std::string("grid.p: ") + e.what());
        rule_ok = false;
      }
    }
  }

  const bool uses_regime = kind_is_annealed(cfg.kind) ||
                           kind_is_quenched(cfg.kind) ||
                           cfg.kind == ExperimentKind::limits_table;
  if (uses_regime && cfg.kind != ExperimentKind::annealed_variance) {
    for (double beta : cfg.betas) {
      try {
        (void)predicted_limit(beta, cfg.regime, 1.0);
      } catch (const std::exception& e) {
        add("grid.beta: beta=" + fmt_full(beta) + " with regime " +
            regime_name(cfg.regime) + ": " + e.what());
      }
    }
  }

  if (kind_is_annealed(cfg.kind)) {
    try {
      (void)test_function(cfg.g_id);
    } catch (const std::exception& e) {
      add(std::string("experiment.g: ") + e.what());
    }
  }
  if (cfg.kind == ExperimentKind::annealed_variance) {
    for (int n : cfg.n_values)
      if (n > cfg.n_guard)
        add("grid.n: N=" + std::to_string(n) + " exceeds n_guard=" +
            std::to_string(cfg.n_guard) + " for the O(N^3) second moment");
  }

  if (kind_is_quenched(cfg.kind)) {
    if (cfg.replicas < 1) add("experiment.replicas: must be >= 1");
    if (cfg.kind == ExperimentKind::quenched_exact) {
      for (int n : cfg.n_values) {
        if (n <= 24 || n < 1) continue;
        bool p_is_one = false;
        try {
          p_is_one = eval_p_rule(cfg.p_rule, n) == 1.0;
        } catch (...) {
        }
        if (!p_is_one)
          add("grid.n: N=" + std::to_string(n) +
              " needs p = 1 or N <= 24 for the exact method");
      }
    } else {
      for (int n : cfg.n_values) {
        if (n < 1) continue;
        try {
          const ChainConfig rc = cfg.chain.resolved(n);
          if ((rc.sweeps - rc.burn_in) / rc.thinning < 1)
            add("chain: no samples would be recorded at N=" +
                std::to_string(n) + "; raise sweeps or lower thinning");
        } catch (const std::exception& e) {
          add(std::string("chain: ") + e.what());
        }
      }
    }
  }

  if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "both")
    add("run.format: \"" + cfg.format + "\" is not csv, json or both");
  if (cfg.threads < 1) add("run.threads: must be >= 1");
  if (cfg.n_guard < 1) add("run.n_guard: must be >= 1");
  if (cfg.out_dir.empty()) add("run.out: output directory must be nonempty");
  return v;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::ostringstream s;
  s << "kind=" << kind_name(cfg.kind) << '\n';
  s << "n=";
  for (size_t i = 0; i < cfg.n_values.size(); ++i)
    s << (i ? "," : "") << cfg.n_values[i];
  s << '\n';
  s << "p=" << cfg.p_rule << '\n';
  s << "beta=";
  for (size_t i = 0; i < cfg.betas.size(); ++i)
    s << (i ? "," : "") << fmt_full(cfg.betas[i]);
  s << '\n';
  s << "regime=" << regime_name(cfg.regime) << '\n';
  s << "g=" << cfg.g_id << '\n';
  s << "replicas=" << cfg.replicas << '\n';
  s << "seed=" << cfg.master_seed << '\n';
  s << "sweeps=" << cfg.chain.sweeps << '\n';
  s << "burn_in=" << cfg.chain.burn_in << '\n';
  s << "thinning=" << cfg.chain.thinning << '\n';
  s << "n_guard=" << cfg.n_guard << '\n';
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(s.str());
  return hex.str();
}

// ---------------------------------------------------------------------------
// Experiment execution and output writers.

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

struct OutputSink {
  const ExperimentConfig& cfg;
  std::string hash;
  std::vector<std::string> files;

  std::string path_for(const char* ext) const {
    return (std::filesystem::path(cfg.out_dir) /
            (kind_name(cfg.kind) + "." + ext))
        .string();
  }

  void write_csv(const std::string& body) {
    if (cfg.format != "csv" && cfg.format != "both") return;
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = path_for("csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "# config " << hash << " seed " << cfg.master_seed << " version "
       << kCodeVersion << "\n";
    os << body;
    files.push_back(path);
  }

  void write_json(json payload) {
    if (cfg.format != "json" && cfg.format != "both") return;
    std::filesystem::create_directories(cfg.out_dir);
    payload["config_hash"] = hash;
    payload["master_seed"] = cfg.master_seed;
    payload["version"] = kCodeVersion;
    payload["kind"] = kind_name(cfg.kind);
    const std::string path = path_for("json");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "// config " << hash << " seed " << cfg.master_seed << " version "
       << kCodeVersion << "\n";
    os << payload.dump(1) << "\n";
    files.push_back(path);
  }
};

std::string cell_label(int n, double p, double beta) {
  std::ostringstream os;
  os << "N=" << n << " p=" << p << " beta=" << beta;
  return os.str();
}

void run_annealed(const ExperimentConfig& cfg, RunRecord& record,
                  OutputSink& sink) {
  const TestFunction& g = test_function(cfg.g_id);
  const ScalingRule scale = scale_for(cfg.regime);
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "N,p,beta,g_id,scale,value_log,prediction_log,ratio\n";
  json cells = json::array();
  for (int n : cfg.n_values) {
    const double p = eval_p_rule(cfg.p_rule, n);
    for (double beta : cfg.betas) {
      const ModelParams params(n, p, beta);
      double value_log, prediction_log, ratio;
      if (cfg.kind == ExperimentKind::annealed_mean) {
        value_log = annealed_mean(params, g, scale);
        prediction_log = mean_prediction(params, g, cfg.regime);
        ratio = std::exp(value_log - prediction_log);
      } else {
        const double l1 = annealed_mean(params, g, scale);
        value_log = annealed_second_moment(params, g, scale, cfg.n_guard,
                                           cfg.threads);
        prediction_log = 2.0 * l1;
        ratio = variance_ratio_from_logs(l1, value_log);
      }
      csv << n << ',' << p << ',' << beta << ',' << cfg.g_id << ','
          << scaling_name(scale) << ',' << value_log << ',' << prediction_log
          << ',' << ratio << '\n';
      cells.push_back({{"n", n},
                       {"p", p},
                       {"beta", beta},
                       {"g_id", cfg.g_id},
                       {"scale", scaling_name(scale)},
                       {"value_log", value_log},
                       {"prediction_log", prediction_log},
                       {"ratio", ratio}});
      record.cells.push_back(
          {cell_label(n, p, beta), value_log, prediction_log, false, true});
    }
  }
  sink.write_csv(csv.str());
  sink.write_json(json{{"cells", cells}});
}

void run_quenched(const ExperimentConfig& cfg, RunRecord& record,
                  OutputSink& sink) {
  const SampleMethod method = cfg.kind == ExperimentKind::quenched_exact
                                  ? SampleMethod::exact
                                  : SampleMethod::mcmc;
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "N,p,beta,regime,method,replica,graph_seed,levy,ks,m2,m4,ess\n";
  json reports = json::array();
  int cell_index = 0;
  for (int n : cfg.n_values) {
    const double p = eval_p_rule(cfg.p_rule, n);
    for (double beta : cfg.betas) {
      const ModelParams params(n, p, beta);
      ChainConfig chain = cfg.chain;
      // Per-cell master seed; replicas then split it on streams 0/1.
      chain.seed = child_seed(cfg.master_seed,
                              static_cast<std::uint64_t>(cell_index), 2);
      const ReplicaReport report = quenched_levy_experiment(
          params, cfg.regime, cfg.replicas, method, chain, cfg.threads);
      json jreplicas = json::array();
      for (size_t r = 0; r < report.replicas.size(); ++r) {
        const ReplicaRecord& rec = report.replicas[r];
        csv << n << ',' << p << ',' << beta << ',' << regime_name(cfg.regime)
            << ',' << method_name(method) << ',' << r << ',' << rec.graph_seed
            << ',' << rec.levy << ',' << rec.ks << ',' << rec.m2 << ','
            << rec.m4 << ',' << rec.ess << '\n';
        json jr = {{"seed", rec.graph_seed},
                   {"levy", rec.levy},
                   {"ks", rec.ks},
                   {"m2", rec.m2},
                   {"m4", rec.m4}};
        if (method == SampleMethod::mcmc) jr["ess"] = rec.ess;
        jreplicas.push_back(std::move(jr));
      }
      const ReplicaAggregate& agg = report.aggregate;
      reports.push_back(
          {{"params", {{"n", n}, {"p", p}, {"beta", beta}}},
           {"regime", regime_name(cfg.regime)},
           {"method", method_name(method)},
           {"replicas", jreplicas},
           {"aggregate",
            {{"median_levy", agg.levy.median},
             {"q1_levy", agg.levy.q1},
             {"q3_levy", agg.levy.q3},
             {"median_ks", agg.ks.median},
             {"q1_ks", agg.ks.q1},
             {"q3_ks", agg.ks.q3},
             {"median_m2", agg.m2.median},
             {"q1_m2", agg.m2.q1},
             {"q3_m2", agg.m2.q3},
             {"median_m4", agg.m4.median},
             {"q1_m4", agg.m4.q1},
             {"q3_m4", agg.m4.q3}}}});
      record.cells.push_back({cell_label(n, p, beta), agg.levy.median, 0.0,
                              false, true});
      ++cell_index;
    }
  }
  sink.write_csv(csv.str());
  sink.write_json(json{{"reports", reports}});
}

void run_limits_table(const ExperimentConfig& cfg, RunRecord& record,
                      OutputSink& sink) {
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "N,p,beta,regime,law,x,pdf,cdf\n";
  json cells = json::array();
  for (int n : cfg.n_values) {
    const double p = eval_p_rule(cfg.p_rule, n);
    for (double beta : cfg.betas) {
      const ModelParams params(n, p, beta);
      const double c = cfg.regime == Regime::crit_line
                           ? critical_line_c(params)
                           : 0.0;
      const PredictedLimit pred = predicted_limit(beta, cfg.regime, c);
      json table = json::array();
      for (int i = 0; i <= 200; ++i) {
        const double x = -5.0 + 0.05 * i;
        const double pdf = pred.law.pdf(x);
        const double cdf = pred.law.cdf(x);
        csv << n << ',' << p << ',' << beta << ',' << regime_name(cfg.regime)
            << ',' << pred.law.name() << ',' << x << ',' << pdf << ',' << cdf
            << '\n';
        table.push_back({{"x", x}, {"pdf", pdf}, {"cdf", cdf}});
      }
      const double m2 = pred.law.moment(2);
      cells.push_back({{"n", n},
                       {"p", p},
                       {"beta", beta},
                       {"regime", regime_name(cfg.regime)},
                       {"law", pred.law.name()},
                       {"scale", scaling_name(pred.scale)},
                       {"m2", m2},
                       {"m4", pred.law.moment(4)},
                       {"table", table}});
      record.cells.push_back({cell_label(n, p, beta), m2, 0.0, false, true});
    }
  }
  sink.write_csv(csv.str());
  sink.write_json(json{{"cells", cells}});
}

VerifySummary run_checks(VerifyLevel level, double a1_perturb, int threads,
                         const std::vector<std::string>& groups);

void run_verify_kind(const ExperimentConfig& cfg, RunRecord& record,
                     OutputSink& sink) {
  const std::string group = cfg.kind == ExperimentKind::verify_expansions
                                ? "expansions"
                                : "combinatorics";
  const VerifySummary summary =
      run_checks(VerifyLevel::full, 0.0, cfg.threads, {group});
  std::ostringstream csv;
  csv << "check,group,pass,detail\n";
  json checks = json::array();
  for (const VerifyCheck& c : summary.checks) {
    csv << c.name << ',' << c.group << ',' << (c.pass ? "pass" : "FAIL")
        << ',' << csv_quote(c.detail) << '\n';
    checks.push_back({{"name", c.name},
                      {"group", c.group},
                      {"pass", c.pass},
                      {"detail", c.detail}});
    record.cells.push_back({c.name, 0.0, 0.0, true, c.pass});
    if (!c.pass) record.all_pass = false;
  }
  sink.write_csv(csv.str());
  sink.write_json(json{{"checks", checks}});
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg) {
  const std::vector<std::string> violations = validate_config(cfg);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid experiment config:";
    for (const std::string& s : violations) msg << "\n  - " << s;
    throw std::invalid_argument(msg.str());
  }

  Timer timer;
  RunRecord record;
  record.config_hash = config_hash(cfg);
  record.code_version = kCodeVersion;
  OutputSink sink{cfg, record.config_hash, {}};

  switch (cfg.kind) {
    case ExperimentKind::annealed_mean:
    case ExperimentKind::annealed_variance:
      run_annealed(cfg, record, sink);
      break;
    case ExperimentKind::quenched_exact:
    case ExperimentKind::quenched_mcmc:
      run_quenched(cfg, record, sink);
      break;
    case ExperimentKind::limits_table:
      run_limits_table(cfg, record, sink);
      break;
    case ExperimentKind::verify_expansions:
    case ExperimentKind::verify_combinatorics:
      run_verify_kind(cfg, record, sink);
      break;
  }

  record.output_files = std::move(sink.files);
  record.wall_seconds = timer.seconds();
  return record;
}

// ---------------------------------------------------------------------------
// Built-in verification checks. The brute-force oracles below use only the
// defining sums (enumeration over graphs, spins or pairs), never the closed
// forms they are checking.

namespace {

int spin_of(std::uint32_t bits, int i) { return (bits >> i) & 1u ? +1 : -1; }

// sum over directed edges (loops included) of s_i s_j for one graph mask.
int interaction_of(int n, std::uint32_t gmask, std::uint32_t sbits) {
  int s = 0;
  while (gmask) {
    const int e = std::countr_zero(gmask);
    gmask &= gmask - 1;
    s += spin_of(sbits, e / n) * spin_of(sbits, e % n);
  }
  return s;
}

long double expected_t_err(int n, double p, double beta,
                           long double a1_perturb) {
  const ModelParams params(n, p, beta);
  const double gamma = params.gamma();
  const SingleCoeffs a = coeffs_single(p, gamma);
  const int nn = n * n;
  const long double log_p = std::log(static_cast<long double>(p));
  const long double log_q = std::log1p(-static_cast<long double>(p));
  const long double lc = std::log(std::cosh(static_cast<long double>(gamma)));
  long double worst = 0.0L;
  for (std::uint32_t sbits = 0; sbits < (1u << n); ++sbits) {
    long double brute = 0.0L;
    for (std::uint32_t gmask = 0; gmask < (1u << nn); ++gmask) {
      const int e = std::popcount(gmask);
      const int s = interaction_of(n, gmask, sbits);
      brute += std::exp(e * log_p + (nn - e) * log_q +
                        static_cast<long double>(gamma) * s - lc * e);
    }
    const long long m = 2LL * std::popcount(sbits) - n;
    const long double closed =
        std::exp(static_cast<long double>(nn) * a.a0 +
                 (static_cast<long double>(a.a1) + a1_perturb) * m * m);
    worst = std::max(worst, std::fabs(closed / brute - 1.0L));
  }
  return worst;
}

long double expected_tt_err(int n, double p, double beta) {
  const ModelParams params(n, p, beta);
  const double gamma = params.gamma();
  const PairCoeffs b = coeffs_pair(p, gamma);
  const int nn = n * n;
  const long double log_p = std::log(static_cast<long double>(p));
  const long double log_q = std::log1p(-static_cast<long double>(p));
  const long double lc = std::log(std::cosh(static_cast<long double>(gamma)));
  long double worst = 0.0L;
  for (std::uint32_t sbits = 0; sbits < (1u << n); ++sbits) {
    for (std::uint32_t tbits = 0; tbits < (1u << n); ++tbits) {
      long double brute = 0.0L;
      for (std::uint32_t gmask = 0; gmask < (1u << nn); ++gmask) {
        const int e = std::popcount(gmask);
        const int s = interaction_of(n, gmask, sbits) +
                      interaction_of(n, gmask, tbits);
        brute += std::exp(e * log_p + (nn - e) * log_q +
                          static_cast<long double>(gamma) * s - 2.0L * lc * e);
      }
      const long long ms = 2LL * std::popcount(sbits) - n;
      const long long mt = 2LL * std::popcount(tbits) - n;
      const long long mo = n - 2LL * std::popcount(sbits ^ tbits);
      const long double closed = std::exp(
          static_cast<long double>(nn) * b.b0 +
          static_cast<long double>(b.b1) * (ms * ms + mt * mt) +
          static_cast<long double>(b.b12) * mo * mo);
      worst = std::max(worst, std::fabs(closed / brute - 1.0L));
    }
  }
  return worst;
}

// E Z and E Z^2 for the g-tilted sum by full (graph, spin) enumeration.
std::pair<long double, long double> brute_annealed(int n, double p,
                                                   double beta,
                                                   const TestFunction& g,
                                                   double denom) {
  const ModelParams params(n, p, beta);
  const double gamma = params.gamma();
  const int nn = n * n;
  const long double log_p = std::log(static_cast<long double>(p));
  const long double log_q = std::log1p(-static_cast<long double>(p));
  const long double lc = std::log(std::cosh(static_cast<long double>(gamma)));
  long double ez = 0.0L, ez2 = 0.0L;
  for (std::uint32_t gmask = 0; gmask < (1u << nn); ++gmask) {
    const int e = std::popcount(gmask);
    const long double w = std::exp(e * log_p + (nn - e) * log_q);
    long double z = 0.0L;
    for (std::uint32_t sbits = 0; sbits < (1u << n); ++sbits) {
      const long long m = 2LL * std::popcount(sbits) - n;
      const int s = interaction_of(n, gmask, sbits);
      z += g.eval(static_cast<double>(m) / denom) *
           std::exp(static_cast<long double>(gamma) * s - lc * e);
    }
    ez += w * z;
    ez2 += w * z * z;
  }
  return {ez, ez2};
}

// Per-state recomputation of the Gibbs law; checks the incremental Gray-code
// enumerator from a second, independent direction.
EmpiricalLaw direct_state_law(const DisorderGraph& graph, double beta,
                              ScalingRule scale) {
  const int n = graph.n();
  std::vector<std::pair<int, int>> edges;
  graph.for_each_edge([&edges](int i, int j) { edges.emplace_back(i, j); });
  const double coupling = beta / (2.0 * n * graph.p());
  std::vector<LogSumAcc> acc(static_cast<size_t>(n) + 1);
  for (std::uint32_t sbits = 0; sbits < (1u << n); ++sbits) {
    long long s = 0;
    for (const auto& [i, j] : edges) s += spin_of(sbits, i) * spin_of(sbits, j);
    const int idx = std::popcount(sbits);
    acc[static_cast<size_t>(idx)].add(coupling * static_cast<double>(s));
  }
  const double denom = scale_value(scale, n, graph.p());
  std::vector<double> atoms(static_cast<size_t>(n) + 1);
  std::vector<double> logw(static_cast<size_t>(n) + 1);
  for (int idx = 0; idx <= n; ++idx) {
    atoms[static_cast<size_t>(idx)] = (2.0 * idx - n) / denom;
    logw[static_cast<size_t>(idx)] = acc[static_cast<size_t>(idx)].value();
  }
  return EmpiricalLaw::from_log_weights(std::move(atoms), std::move(logw));
}

unsigned long long exact_binom(int n, int r) {
  if (r < 0 || r > n) return 0;
  unsigned long long acc = 1;
  for (int i = 1; i <= r; ++i)
    acc = acc * static_cast<unsigned long long>(n - r + i) /
          static_cast<unsigned long long>(i);
  return acc;
}

EmpiricalLaw random_law(Rng& rng) {
  const int count = 3 + static_cast<int>(uniform_below(rng, 22));
  std::vector<double> atoms(static_cast<size_t>(count));
  std::vector<double> weights(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    atoms[static_cast<size_t>(i)] = 4.0 * uniform01(rng) - 2.0;
    weights[static_cast<size_t>(i)] = 0.05 + uniform01(rng);
  }
  return EmpiricalLaw(std::move(atoms), std::move(weights));
}

struct CheckCtx {
  double a1_perturb;
  int threads;
};

struct CheckOutcome {
  bool pass;
  std::string detail;
};

using CheckFn = std::function<CheckOutcome(const CheckCtx&)>;

struct CheckDef {
  const char* name;
  const char* group;
  bool full_only;
  CheckFn fn;
};

std::string fmt_sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

std::string fmt_fix(double v, int prec = 5) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

// --- expansions group ---

CheckOutcome check_expected_t(const CheckCtx& ctx) {
  long double worst = 0.0L;
  for (double p : {0.3, 0.7})
    for (double beta : {0.5, 1.0})
      worst = std::max(worst, expected_t_err(3, p, beta,
                                             static_cast<long double>(
                                                 ctx.a1_perturb)));
  const double w = static_cast<double>(worst);
  return {w <= 1e-12,
          "max rel err " + fmt_sci(w) +
              " vs 512-graph enumeration, N=3, p in {0.3,0.7}, beta in "
              "{0.5,1.0} (tol 1e-12)"};
}

CheckOutcome check_expected_tt(const CheckCtx&) {
  long double worst = 0.0L;
  for (double p : {0.3, 0.7})
    for (double beta : {0.5, 1.0})
      worst = std::max(worst, expected_tt_err(3, p, beta));
  const double w = static_cast<double>(worst);
  return {w <= 1e-12, "max rel err " + fmt_sci(w) +
                          " over all 64 spin pairs x 4 parameter sets "
                          "(tol 1e-12)"};
}

CheckOutcome check_coeff_structure(const CheckCtx&) {
  double worst_single = 0.0, worst_pair = 0.0;
  bool b_equal = true;
  for (double p : {0.1, 0.45, 0.9}) {
    for (double z : {0.04, 0.3, 1.1}) {
      const SingleCoeffs a = coeffs_single(p, z);
      worst_single = std::max(
          worst_single, std::fabs(a.a0 + a.a1 - eval_f(1, 1.0, p, z)));
      worst_single = std::max(
          worst_single, std::fabs(a.a0 - a.a1 - eval_f(1, -1.0, p, z)));
      const PairCoeffs b = coeffs_pair(p, z);
      if (b.b1 != b.b2) b_equal = false;
      const double g2 = eval_f(2, 2.0, p, z);
      const double g0 = eval_f(2, 0.0, p, z);
      const double gm = eval_f(2, -2.0, p, z);
      worst_pair = std::max(
          worst_pair, std::fabs(b.b0 + b.b1 + b.b2 + b.b12 - g2));
      worst_pair = std::max(
          worst_pair, std::fabs(b.b0 - b.b1 - b.b2 + b.b12 - gm));
      worst_pair = std::max(
          worst_pair, std::fabs(b.b0 + b.b1 - b.b2 - b.b12 - g0));
      worst_pair = std::max(
          worst_pair, std::fabs(b.b0 - b.b1 + b.b2 - b.b12 - g0));
    }
  }
  const bool pass = b_equal && worst_single <= 1e-14 && worst_pair <= 1e-13;
  return {pass, std::string("b1 == b2 ") + (b_equal ? "exactly" : "VIOLATED") +
                    "; single reconstruction err " + fmt_sci(worst_single) +
                    " (tol 1e-14), pair system err " + fmt_sci(worst_pair) +
                    " (tol 1e-13)"};
}

CheckOutcome check_residual_orders(const CheckCtx&) {
  // Leading orders of the implemented residuals. The pair-overlap residual
  // is even in z, so its measured order is 4 (the acceptance suite gates it
  // against the source-asserted value instead).
  const double z_truth[5] = {4.0, 3.0, 3.0, 4.0, 4.0};
  const double p_truth[5] = {4.0, 3.0, 2.0, 3.0, 2.0};
  bool pass = true;
  std::string detail;
  for (size_t i = 0; i < 5; ++i) {
    const FittedOrders f = residual_order(kAllIdentities[i]);
    const bool ok = std::fabs(f.z_order - z_truth[i]) <= 0.2 &&
                    std::fabs(f.p_order - p_truth[i]) <= 0.35;
    pass = pass && ok;
    if (!detail.empty()) detail += ", ";
    detail += std::string(identity_name(kAllIdentities[i])) + " z=" +
              fmt_fix(f.z_order, 2) + " p=" + fmt_fix(f.p_order, 2) +
              (ok ? "" : " OUT OF BAND");
  }
  return {pass, detail};
}

CheckOutcome check_eval_f_direct(const CheckCtx&) {
  double worst = 0.0;
  for (int m : {1, 2})
    for (double p : {0.2, 0.8})
      for (double z : {0.1, 0.5})
        for (double x : {-2.0, 1.0}) {
          const double direct = std::log(
              1.0 - p + p * std::exp(x * z - m * std::log(std::cosh(z))));
          worst = std::max(worst, std::fabs(eval_f(m, x, p, z) - direct));
        }
  return {worst <= 1e-12, "max abs diff vs direct evaluation " +
                              fmt_sci(worst) + " (tol 1e-12)"};
}

// --- combinatorics group ---

CheckOutcome check_triple_count_brute(const CheckCtx&) {
  double worst_log = 0.0;
  for (int n = 2; n <= 12; ++n) {
    const int dim = n + 1;
    std::vector<unsigned long long> tally(
        static_cast<size_t>(dim) * dim * dim, 0);
    std::vector<int> pc(static_cast<size_t>(1) << n);
    for (std::uint32_t m = 0; m < (1u << n); ++m) pc[m] = std::popcount(m);
    for (std::uint32_t sb = 0; sb < (1u << n); ++sb) {
      const int ki = pc[sb];
      for (std::uint32_t tb = 0; tb < (1u << n); ++tb) {
        const int li = pc[tb];
        const int mi = n - pc[sb ^ tb];  // overlap (m+n)/2
        ++tally[(static_cast<size_t>(ki) * dim + li) * dim + mi];
      }
    }
    unsigned long long total = 0;
    for (int ki = 0; ki <= n; ++ki)
      for (int li = 0; li <= n; ++li)
        for (int mi = 0; mi <= n; ++mi) {
          const long long k = 2LL * ki - n;
          const long long l = 2LL * li - n;
          const long long m = 2LL * mi - n;
          const unsigned long long want =
              tally[(static_cast<size_t>(ki) * dim + li) * dim + mi];
          total += want;
          if (count_triple_exact(n, k, l, m) != want)
            return {false, "integer count mismatch at N=" + std::to_string(n)};
          const double lc = count_triple(n, k, l, m).log_count;
          if (want == 0) {
            if (lc != kNegInf)
              return {false,
                      "zero case not -inf at N=" + std::to_string(n)};
          } else {
            worst_log = std::max(
                worst_log,
                std::fabs(lc - std::log(static_cast<double>(want))));
          }
        }
    if (total != (1ull << (2 * n)))
      return {false, "counts do not sum to 4^N at N=" + std::to_string(n)};
  }
  return {worst_log <= 1e-12,
          "all integer counts match brute force for N=2..12; max log diff " +
              fmt_sci(worst_log) + " (tol 1e-12)"};
}

CheckOutcome check_triple_marginalization(const CheckCtx&) {
  for (int n = 2; n <= 12; ++n) {
    for (int ki = 0; ki <= n; ++ki)
      for (int li = 0; li <= n; ++li) {
        const long long k = 2LL * ki - n;
        const long long l = 2LL * li - n;
        unsigned long long sum = 0;
        for (long long m = -n; m <= n; ++m)
          sum += count_triple_exact(n, k, l, m);
        const unsigned long long want =
            exact_binom(n, ki) * exact_binom(n, li);
        if (sum != want)
          return {false, "marginalization mismatch at N=" + std::to_string(n) +
                             " k=" + std::to_string(k) +
                             " l=" + std::to_string(l)};
      }
  }
  return {true, "sum_m nu(k,l,m) == nu(k) nu(l) exactly for all k,l, N=2..12"};
}

CheckOutcome check_marginalization_log(const CheckCtx&) {
  const int n = 10000;
  const LogFactorialTable lf(n);
  const long long pairs[4][2] = {{0, 0}, {100, -50}, {5000, 2500}, {9998, 0}};
  double worst = 0.0;
  for (const auto& pr : pairs) {
    const long long k = pr[0], l = pr[1];
    LogSumAcc acc;
    for (long long m = -n; m <= n; m += 2)
      acc.add(log_count_triple(lf, n, k, l, m));
    const double want = log_count_single(n, k) + log_count_single(n, l);
    worst = std::max(worst, std::fabs(acc.value() - want));
  }
  return {worst <= 1e-9, "max log-domain marginalization error " +
                             fmt_sci(worst) + " at N=10^4 (tol 1e-9)"};
}

CheckOutcome check_entropy_taylor(const CheckCtx&) {
  if (taylor_coeff(2) != 0.5 || taylor_coeff(3) != 0.0 ||
      taylor_coeff(4) != 1.0 / 12.0)
    return {false, "d2, d3, d4 are not 1/2, 0, 1/12"};
  if (entropy_i(0.0) != 0.0) return {false, "I(0) != 0"};
  if (std::fabs(entropy_i(1.0) - kLog2) > 1e-15 ||
      std::fabs(entropy_i(-1.0) - kLog2) > 1e-15)
    return {false, "I(+-1) != log 2"};
  double worst = 0.0;
  for (double x : {0.05, 0.1, 0.2}) {
    double series = 0.0;
    for (int i = 2; i <= 16; ++i) series += taylor_coeff(i) * std::pow(x, i);
    const double tol = 2.0 * std::pow(x, 18);
    worst = std::max(worst, std::fabs(entropy_i(x) - series) /
                                std::max(tol, 1e-16));
    if (entropy_i(x) != entropy_i(-x)) return {false, "I not even"};
  }
  bool threw = false;
  try {
    (void)entropy_i(1.0000001);
  } catch (const std::domain_error&) {
    threw = true;
  }
  if (!threw) return {false, "no domain error for |x| > 1"};
  return {worst <= 1.0, "Taylor partial sums match I(x) within the series "
                        "tail bound; endpoint and domain behavior correct"};
}

CheckOutcome check_crude_count_bound(const CheckCtx&) {
  double cmin_all = 1e300, cmax_all = 0.0;
  for (int n : {10, 100, 1000, 10000}) {
    for (long long k = -n; k <= n; k += 2) {
      const double log_ref = -0.5 * std::log(static_cast<double>(n)) +
                             n * kLog2 -
                             n * entropy_i(static_cast<double>(k) / n) -
                             lambda_boundary(n, k);
      const double ratio = std::exp(log_count_single(n, k) - log_ref);
      cmin_all = std::min(cmin_all, ratio);
      cmax_all = std::max(cmax_all, ratio);
    }
  }
  const bool pass = cmin_all > 0.0 && cmin_all <= cmax_all && cmax_all < 10.0;
  return {pass, "fitted sandwich constants c=" + fmt_fix(cmin_all) +
                    ", C=" + fmt_fix(cmax_all) +
                    " over N in {10,100,1000,10000}, |k| <= N (need 0 < c <= "
                    "C < 10)"};
}

CheckOutcome check_lambda_clt_bounds(const CheckCtx&) {
  for (int n : {10, 50, 100, 1000}) {
    const double bound = 0.5 * std::log(static_cast<double>(n));
    for (long long k = -n; k <= n; k += 2) {
      if (4 * k * k < static_cast<long long>(n) * n) continue;
      if (-lambda_boundary(n, k) > bound + 1e-12)
        return {false, "-lambda exceeds (1/2) log N at N=" +
                           std::to_string(n) + ", k=" + std::to_string(k)};
    }
  }
  double c_star = 0.0;
  for (int n : {10, 100, 1000, 10000}) {
    for (long long k = -n; k <= n; k += 2) {
      const double log_ratio =
          log_count_single(n, k) - n * kLog2 +
          0.5 * std::log(static_cast<double>(n)) +
          static_cast<double>(k) * k / (2.0 * n);
      c_star = std::max(c_star, std::exp(log_ratio));
    }
  }
  return {c_star < 4.0, "boundary-window lambda bound holds; single "
                        "local-CLT constant C=" +
                            fmt_fix(c_star) + " (need < 4)"};
}

CheckOutcome check_stirling_window(const CheckCtx&) {
  double prev = 1e300;
  bool decreasing = true;
  std::string vals;
  double last = 0.0;
  for (int n : {100, 1000, 10000}) {
    const long long window =
        static_cast<long long>(std::pow(static_cast<double>(n), 0.8));
    const double gap = stirling_gap(n, window);
    decreasing = decreasing && gap < prev;
    prev = gap;
    last = gap;
    if (!vals.empty()) vals += " -> ";
    vals += fmt_sci(gap);
  }
  return {decreasing && last < 0.01,
          "gap " + vals + " over N in {1e2,1e3,1e4}, window N^0.8 "
          "(need decreasing, final < 0.01)"};
}

// --- laws group ---

CheckOutcome check_limit_law_normalization(const CheckCtx&) {
  const LimitLaw g2 = LimitLaw::gauss(2.0);
  const LimitLaw quartic = LimitLaw::quartic();
  const LimitLaw qg = LimitLaw::quartic_gauss(1.0);
  const LimitLaw qg_eps = LimitLaw::quartic_gauss(1e-6);
  double worst = 0.0;
  for (const LimitLaw* law : {&g2, &quartic, &qg, &qg_eps}) {
    worst = std::max(worst, std::fabs(law->moment(0) - 1.0));
    worst = std::max(worst, std::fabs(law->moment(3)));
  }
  if (worst > 1e-10) return {false, "moment(0)/moment(3) off by " + fmt_sci(worst)};
  const double m2_gauss_err = std::fabs(g2.moment(2) - 2.0);
  const double quartic_m2_want =
      std::sqrt(12.0) * std::tgamma(0.75) / std::tgamma(0.25);
  const double m2_quartic_err = std::fabs(quartic.moment(2) - quartic_m2_want);
  double sup_pdf = 0.0;
  for (int i = -600; i <= 600; ++i) {
    const double x = 0.01 * i;
    sup_pdf = std::max(sup_pdf, std::fabs(qg_eps.pdf(x) - quartic.pdf(x)));
  }
  const double cdf_mid = std::fabs(quartic.cdf(0.0) - 0.5);
  const bool pass = m2_gauss_err <= 1e-9 && m2_quartic_err <= 1e-9 &&
                    sup_pdf <= 1e-5 && cdf_mid <= 2e-7;
  return {pass, "gauss(2) m2 err " + fmt_sci(m2_gauss_err) +
                    ", quartic m2 err " + fmt_sci(m2_quartic_err) +
                    " vs gamma-function value, quartic_gauss(1e-6) vs "
                    "quartic sup pdf diff " +
                    fmt_sci(sup_pdf) + ", quartic cdf(0)-1/2 " +
                    fmt_sci(cdf_mid)};
}

CheckOutcome check_levy_point_mass(const CheckCtx&) {
  double worst = 0.0;
  for (double a : {1e-4, 0.01, 0.3, 0.99, 1.0, 1.7}) {
    const EmpiricalLaw zero({0.0}, {1.0});
    const EmpiricalLaw shifted({a}, {1.0});
    const double d = distance(Metric::levy, zero, shifted);
    worst = std::max(worst, std::fabs(d - std::min(a, 1.0)));
  }
  return {worst <= 1e-9,
          "max |levy(delta_0, delta_a) - min(a,1)| = " + fmt_sci(worst) +
              " (tol 1e-9)"};
}

CheckOutcome check_levy_vs_ks(const CheckCtx&) {
  Rng rng(20240817ull);
  double worst_gap = -1e300, worst_sym = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const EmpiricalLaw a = random_law(rng);
    const EmpiricalLaw b = random_law(rng);
    const double levy_ab = distance(Metric::levy, a, b);
    const double levy_ba = distance(Metric::levy, b, a);
    const double ks_ab = distance(Metric::ks, a, b);
    worst_gap = std::max(worst_gap, levy_ab - ks_ab);
    worst_sym = std::max(worst_sym, std::fabs(levy_ab - levy_ba));
    if (distance(Metric::levy, a, a) != 0.0)
      return {false, "levy(a, a) != 0"};
  }
  // The levy solver returns a feasible upper bound resolved to 5e-11, so
  // the comparison carries that slack.
  const bool pass = worst_gap <= 1e-10 && worst_sym <= 1e-10;
  return {pass, "max(levy - ks) = " + fmt_sci(worst_gap) +
                    " (tol 1e-10), max symmetry gap " + fmt_sci(worst_sym)};
}

CheckOutcome check_levy_triangle(const CheckCtx&) {
  Rng rng(77001ull);
  double worst = -1e300;
  for (int rep = 0; rep < 10; ++rep) {
    const EmpiricalLaw a = random_law(rng);
    const EmpiricalLaw b = random_law(rng);
    const EmpiricalLaw c = random_law(rng);
    const double lhs = distance(Metric::levy, a, c);
    const double rhs =
        distance(Metric::levy, a, b) + distance(Metric::levy, b, c);
    worst = std::max(worst, lhs - rhs);
  }
  return {worst <= 1e-8,
          "max triangle violation " + fmt_sci(worst) + " (tol 1e-8)"};
}

// --- chains group ---

CheckOutcome check_empty_graph_law(const CheckCtx&) {
  const ModelParams params(2, 1e-9, 0.7);
  for (std::uint64_t seed = 1; seed <= 64; ++seed) {
    const DisorderGraph graph(params, seed);
    if (graph.edge_count() != 0) continue;
    const EmpiricalLaw law = exact_law(graph, 0.7, ScalingRule::sqrt_n);
    if (law.atoms().size() != 3) return {false, "law does not have 3 atoms"};
    const double w0 = law.weights()[0], w1 = law.weights()[1],
                 w2 = law.weights()[2];
    const double err = std::max({std::fabs(w0 - 0.25), std::fabs(w1 - 0.5),
                                 std::fabs(w2 - 0.25)});
    return {err <= 1e-15,
            "edgeless N=2 weights (0.25, 0.5, 0.25), max err " + fmt_sci(err)};
  }
  return {false, "no edgeless sample found (p = 1e-9, 64 seeds)"};
}

CheckOutcome check_gray_vs_direct(const CheckCtx&) {
  const ModelParams params(10, 0.35, 0.9);
  const DisorderGraph graph(params, 12345);
  const EmpiricalLaw a = exact_law(graph, 0.9, ScalingRule::sqrt_n);
  const EmpiricalLaw b = direct_state_law(graph, 0.9, ScalingRule::sqrt_n);
  const double tv = distance(Metric::tv, a, b);
  return {tv <= 1e-13, "TV between incremental and per-state enumeration " +
                           fmt_sci(tv) + " at N=10 (tol 1e-13)"};
}

CheckOutcome check_full_graph_law(const CheckCtx&) {
  const ModelParams params(12, 1.0, 1.0);
  const DisorderGraph graph(params, 1);
  const EmpiricalLaw direct = direct_state_law(graph, 1.0, ScalingRule::n34);
  const EmpiricalLaw closed = full_graph_law(12, 1.0, ScalingRule::n34);
  const double tv = distance(Metric::tv, direct, closed);
  return {tv <= 1e-13, "TV between enumerated p=1 law and nu(k) "
                       "exp(beta k^2/2N) form " +
                           fmt_sci(tv) + " (tol 1e-13)"};
}

CheckOutcome check_detailed_balance(const CheckCtx&) {
  const ModelParams params(4, 0.6, 0.8);
  const DisorderGraph graph(params, 7);
  const auto pmat = transition_matrix(graph, 0.8);
  std::vector<std::pair<int, int>> edges;
  graph.for_each_edge([&edges](int i, int j) { edges.emplace_back(i, j); });
  const double coupling = 0.8 / (2.0 * 4 * 0.6);
  std::vector<double> logw(16);
  for (std::uint32_t s = 0; s < 16; ++s) {
    long long sum = 0;
    for (const auto& [i, j] : edges) sum += spin_of(s, i) * spin_of(s, j);
    logw[s] = coupling * static_cast<double>(sum);
  }
  const double norm = log_sum_exp(logw);
  double worst = 0.0, worst_row = 0.0;
  for (size_t x = 0; x < 16; ++x) {
    double row = 0.0;
    for (size_t y = 0; y < 16; ++y) {
      row += pmat[x][y];
      worst = std::max(worst, std::fabs(std::exp(logw[x] - norm) * pmat[x][y] -
                                        std::exp(logw[y] - norm) * pmat[y][x]));
    }
    worst_row = std::max(worst_row, std::fabs(row - 1.0));
  }
  const bool pass = worst <= 1e-12 && worst_row <= 1e-14;
  return {pass, "max |pi P - transpose| = " + fmt_sci(worst) +
                    " (tol 1e-12), max row-sum defect " + fmt_sci(worst_row)};
}

CheckOutcome check_glauber_determinism(const CheckCtx&) {
  const ModelParams params(30, 0.3, 0.7);
  const DisorderGraph graph(params, 11);
  ChainConfig cfg;
  cfg.sweeps = 200;
  cfg.burn_in = 50;
  cfg.thinning = 3;
  cfg.seed = 13;
  const auto a = glauber_chain(graph, 0.7, cfg);
  const auto b = glauber_chain(graph, 0.7, cfg);
  if (a != b) return {false, "two identical runs differ"};
  if (a.size() != 50)
    return {false, "expected 50 recorded samples, got " +
                       std::to_string(a.size())};
  return {true, "identical (graph, config) reproduces the sample sequence; "
                "recording schedule correct"};
}

CheckOutcome check_glauber_beta0(const CheckCtx&) {
  const ModelParams params(50, 0.3, 0.0);
  const DisorderGraph graph(params, 5);
  ChainConfig cfg;
  cfg.sweeps = 4500;
  cfg.burn_in = 500;
  cfg.thinning = 1;
  cfg.seed = 99;
  const auto ms = glauber_chain(graph, 0.0, cfg);
  double mean = 0.0;
  for (long long m : ms) mean += static_cast<double>(m);
  mean /= static_cast<double>(ms.size());
  double var = 0.0;
  for (long long m : ms) {
    const double d = static_cast<double>(m) - mean;
    var += d * d;
  }
  var /= static_cast<double>(ms.size());
  const double se = std::sqrt(50.0 / static_cast<double>(ms.size()));
  const bool pass = std::fabs(mean) <= 4.0 * se &&
                    std::fabs(var / 50.0 - 1.0) <= 0.05;
  return {pass, "beta=0 chain: mean " + fmt_fix(mean, 4) + " (4 SE bound " +
                    fmt_fix(4.0 * se, 4) + "), Var/N " + fmt_fix(var / 50.0, 4) +
                    " (need within 5% of 1)"};
}

CheckOutcome check_mcmc_vs_exact(const CheckCtx&) {
  const int n = 10;
  const ModelParams params(n, 0.5, 0.8);
  const DisorderGraph graph(params, 3);
  const EmpiricalLaw exact = exact_law(graph, 0.8, ScalingRule::sqrt_n);
  ChainConfig cfg;
  cfg.sweeps = 200000;
  cfg.burn_in = 1000;
  cfg.thinning = 1;
  cfg.seed = 17;
  const auto ms = glauber_chain(graph, 0.8, cfg);
  const double denom = scale_value(ScalingRule::sqrt_n, n, 0.5);
  std::vector<double> atoms(static_cast<size_t>(n) + 1);
  std::vector<double> weights(static_cast<size_t>(n) + 1, 0.0);
  for (int idx = 0; idx <= n; ++idx)
    atoms[static_cast<size_t>(idx)] = (2.0 * idx - n) / denom;
  for (long long m : ms) weights[static_cast<size_t>((m + n) / 2)] += 1.0;
  const EmpiricalLaw hist =
      EmpiricalLaw(std::move(atoms), std::move(weights)).symmetrized();
  const double tv = distance(Metric::tv, hist, exact);
  return {tv <= 0.03, "TV(chain histogram, exact law) = " + fmt_fix(tv, 5) +
                          " after 2e5 sweeps at N=10 (tol 0.03)"};
}

CheckOutcome check_ess_diagnostic(const CheckCtx&) {
  Rng rng(2024ull);
  const size_t count = 4000;
  std::vector<double> iid(count), ar(count);
  for (size_t i = 0; i < count; ++i) iid[i] = uniform01(rng);
  ar[0] = 0.0;
  for (size_t i = 1; i < count; ++i)
    ar[i] = 0.9 * ar[i - 1] + (uniform01(rng) - 0.5);
  const double ess_iid = effective_sample_size(iid);
  const double ess_ar = effective_sample_size(ar);
  std::vector<double> flat(100, 3.0);
  const double ess_flat = effective_sample_size(flat);
  const bool pass = ess_iid >= 2000.0 && ess_ar <= 1000.0 && ess_ar >= 20.0 &&
                    ess_flat == 100.0;
  return {pass, "ESS: iid " + fmt_fix(ess_iid, 0) + " of 4000, AR(0.9) " +
                    fmt_fix(ess_ar, 0) + " (expect ~210), constant series " +
                    fmt_fix(ess_flat, 0)};
}

// --- annealed group ---

CheckOutcome check_annealed_beta0(const CheckCtx&) {
  const ModelParams params(30, 0.37, 0.0);
  const TestFunction& one = test_function("one");
  const double mean_err =
      std::fabs(annealed_mean(params, one, ScalingRule::sqrt_n) - 30.0 * kLog2);
  const double second_err = std::fabs(
      annealed_second_moment(params, one, ScalingRule::sqrt_n) - 60.0 * kLog2);
  const double vr = variance_ratio(params, one, ScalingRule::sqrt_n);
  const bool pass = mean_err <= 1e-10 && second_err <= 1e-10 && vr <= 1e-12;
  return {pass, "beta=0: |log mean - N log 2| = " + fmt_sci(mean_err) +
                    ", |log second - 2N log 2| = " + fmt_sci(second_err) +
                    ", variance ratio " + fmt_sci(vr)};
}

CheckOutcome check_annealed_n3_brute(const CheckCtx&) {
  const ModelParams params(3, 0.4, 0.8);
  const TestFunction& g = test_function("gauss");
  const double denom = scale_value(ScalingRule::sqrt_n, 3, 0.4);
  const auto [ez, ez2] = brute_annealed(3, 0.4, 0.8, g, denom);
  const double mean_log = annealed_mean(params, g, ScalingRule::sqrt_n);
  const double second_log =
      annealed_second_moment(params, g, ScalingRule::sqrt_n);
  const double rel1 = std::fabs(
      static_cast<double>(std::exp(static_cast<long double>(mean_log)) / ez) -
      1.0);
  const double rel2 = std::fabs(
      static_cast<double>(std::exp(static_cast<long double>(second_log)) /
                          ez2) -
      1.0);
  const double vr = variance_ratio(params, g, ScalingRule::sqrt_n);
  const double vr_brute = static_cast<double>(ez2 / (ez * ez) - 1.0L);
  const double vr_err = std::fabs(vr - vr_brute);
  const bool pass = rel1 <= 1e-12 && rel2 <= 1e-12 && vr_err <= 1e-10;
  return {pass, "N=3 vs full enumeration: mean rel err " + fmt_sci(rel1) +
                    ", second-moment rel err " + fmt_sci(rel2) +
                    ", variance-ratio err " + fmt_sci(vr_err)};
}

CheckOutcome check_second_moment_guard(const CheckCtx&) {
  const ModelParams big(401, 0.3, 0.5);
  const TestFunction& one = test_function("one");
  bool threw = false;
  std::string msg;
  try {
    (void)annealed_second_moment(big, one, ScalingRule::sqrt_n, 400);
  } catch (const std::invalid_argument& e) {
    threw = true;
    msg = e.what();
  }
  if (!threw || msg.find("guard") == std::string::npos)
    return {false, "guard refusal missing or lacks a cost estimate"};
  const ModelParams params(60, 0.5, 0.9);
  const TestFunction& g = test_function("gauss");
  const double one_thread =
      annealed_second_moment(params, g, ScalingRule::sqrt_n, 400, 1);
  const double three_threads =
      annealed_second_moment(params, g, ScalingRule::sqrt_n, 400, 3);
  if (one_thread != three_threads)
    return {false, "thread count changed the second moment"};
  return {true, "N > guard refused with cost estimate; 1-thread and 3-thread "
                "sums bit-identical"};
}

CheckOutcome annealed_trend(Regime regime, const std::string& p_rule,
                            double beta, const char* label, double band) {
  const TestFunction& g = test_function("gauss");
  const ScalingRule scale = scale_for(regime);
  double prev = 1e300;
  bool shrinking = true;
  std::string vals;
  double last = 0.0;
  for (int n : {1000, 10000, 100000}) {
    const double p = eval_p_rule(p_rule, n);
    const ModelParams params(n, p, beta);
    const double ratio = std::exp(annealed_mean(params, g, scale) -
                                  mean_prediction(params, g, regime));
    const double gap = std::fabs(ratio - 1.0);
    shrinking = shrinking && gap < prev;
    prev = gap;
    last = gap;
    if (!vals.empty()) vals += " -> ";
    vals += fmt_fix(ratio, 6);
  }
  return {shrinking && last <= band,
          std::string(label) + ": ratio " + vals +
              " (need monotone approach, final within 1 +- " +
              fmt_fix(band, 2) + ")"};
}

CheckOutcome check_hightemp_trend(const CheckCtx&) {
  return annealed_trend(Regime::high_temp, "const:0.2", 0.5,
                        "beta=0.5 p=0.2 g=gauss", 0.02);
}

CheckOutcome check_crit_diverging_trend(const CheckCtx&) {
  return annealed_trend(Regime::crit_diverging, "one", 1.0, "beta=1 p=1",
                        0.05);
}

CheckOutcome check_crit_line_trend(const CheckCtx&) {
  return annealed_trend(Regime::crit_line, "critline:1", 1.0,
                        "beta=1 p^4N^3=1", 0.05);
}

CheckOutcome check_crit_vanishing_trend(const CheckCtx&) {
  return annealed_trend(Regime::crit_vanishing, "power:0.8", 1.0,
                        "beta=1 p=N^-0.8", 0.05);
}

CheckOutcome check_g1_band(const CheckCtx&) {
  const TestFunction& one = test_function("one");
  bool pass = true;
  std::string detail;
  for (double p : {0.1, 0.5, 1.0}) {
    double prev = 1e300;
    for (int n : {10000, 100000}) {
      const ModelParams params(n, p, 0.5);
      const double ratio =
          std::exp(annealed_mean(params, one, ScalingRule::sqrt_n) -
                   mean_prediction(params, one, Regime::high_temp));
      pass = pass && ratio >= 0.9 && ratio <= 1.1 &&
             std::fabs(ratio - 1.0) < prev;
      prev = std::fabs(ratio - 1.0);
      if (!detail.empty()) detail += ", ";
      detail += "p=" + fmt_fix(p, 1) + " N=" + std::to_string(n) + ": " +
                fmt_fix(ratio, 6);
    }
  }
  return {pass, detail + " (need all in [0.9, 1.1], gaps shrinking)"};
}

CheckOutcome check_variance_trend(const CheckCtx& ctx) {
  const TestFunction& one = test_function("one");
  double prev = 1e300;
  bool decreasing = true;
  std::string vals;
  for (int n : {50, 100, 200, 400}) {
    const ModelParams params(n, 0.3, 0.5);
    const double vr =
        variance_ratio(params, one, ScalingRule::sqrt_n, 400, ctx.threads);
    decreasing = decreasing && vr < prev;
    prev = vr;
    if (!vals.empty()) vals += " -> ";
    vals += fmt_sci(vr);
  }
  return {decreasing, "beta=0.5 p=0.3: variance ratio " + vals +
                          " (need strictly decreasing)"};
}

// --- quenched group ---

CheckOutcome check_quenched_shape(const CheckCtx&) {
  const ModelParams params(12, 0.6, 0.5);
  ChainConfig cfg;
  cfg.seed = 42;
  const ReplicaReport a = quenched_levy_experiment(
      params, Regime::high_temp, 8, SampleMethod::exact, cfg, 1);
  const ReplicaReport b = quenched_levy_experiment(
      params, Regime::high_temp, 8, SampleMethod::exact, cfg, 2);
  if (a.replicas.size() != 8) return {false, "wrong replica count"};
  for (size_t r = 0; r < 8; ++r) {
    const ReplicaRecord& rec = a.replicas[r];
    if (!(rec.levy >= 0.0 && rec.levy <= 1.0))
      return {false, "levy distance outside [0, 1]"};
    if (!(rec.ks >= 0.0 && rec.ks <= 1.0))
      return {false, "ks distance outside [0, 1]"};
    if (!std::isfinite(rec.m2) || !std::isfinite(rec.m4))
      return {false, "non-finite moments"};
    if (rec.levy != b.replicas[r].levy)
      return {false, "thread count changed a replica result"};
  }
  const ReplicaAggregate& agg = a.aggregate;
  if (!(agg.levy.q1 <= agg.levy.median && agg.levy.median <= agg.levy.q3))
    return {false, "quartiles out of order"};
  return {true, "8 exact replicas: distances in range, moments finite, "
                "quartiles ordered, thread-count invariant"};
}

CheckOutcome check_quenched_beta0(const CheckCtx& ctx) {
  const ModelParams params(20, 0.5, 0.0);
  ChainConfig cfg;
  cfg.seed = 7;
  const ReplicaReport report = quenched_levy_experiment(
      params, Regime::high_temp, 4, SampleMethod::exact, cfg, ctx.threads);
  // At beta = 0 the law is the scaled binomial for every graph; its Levy
  // distance to the standard Gaussian at N=20 is about 0.063 (driven by the
  // central atom of mass ~0.176), so the bound below is the honest one.
  const double med = report.aggregate.levy.median;
  return {med < 0.08, "beta=0 N=20: median levy distance to gauss(1) = " +
                          fmt_fix(med, 5) + " (bound 0.08)"};
}

CheckOutcome check_p1_ks_trend(const CheckCtx&) {
  const LimitLaw quartic = LimitLaw::quartic();
  double prev = 1e300;
  bool decreasing = true;
  std::string vals;
  double last = 0.0;
  for (int n : {1000, 10000, 100000}) {
    const EmpiricalLaw law = full_graph_law(n, 1.0, ScalingRule::n34);
    const double ks = distance(Metric::ks, law, quartic);
    decreasing = decreasing && ks < prev;
    prev = ks;
    last = ks;
    if (!vals.empty()) vals += " -> ";
    vals += fmt_sci(ks);
  }
  return {decreasing && last < 0.05,
          "p=1 beta=1 law vs quartic: KS " + vals +
              " (need decreasing, final < 0.05)"};
}

CheckOutcome check_quenched_levy_trend(const CheckCtx& ctx) {
  ChainConfig cfg;
  cfg.seed = 2024;
  double prev = 1e300;
  bool decreasing = true;
  std::string vals;
  for (int n : {12, 16, 20}) {
    const ModelParams params(n, 0.6, 0.5);
    const ReplicaReport report = quenched_levy_experiment(
        params, Regime::high_temp, 100, SampleMethod::exact, cfg,
        ctx.threads);
    const double med = report.aggregate.levy.median;
    decreasing = decreasing && med < prev;
    prev = med;
    if (!vals.empty()) vals += " -> ";
    vals += fmt_fix(med, 5);
  }
  return {decreasing, "beta=0.5 p=0.6, 100 replicas: median levy " + vals +
                          " (need strictly decreasing)"};
}

std::vector<CheckDef> make_checks() {
  return {
      {"expected-t-identity", "expansions", false, check_expected_t},
      {"expected-tt-identity", "expansions", false, check_expected_tt},
      {"coeff-structure", "expansions", false, check_coeff_structure},
      {"residual-orders", "expansions", false, check_residual_orders},
      {"eval-f-direct", "expansions", false, check_eval_f_direct},
      {"triple-count-brute", "combinatorics", false, check_triple_count_brute},
      {"triple-marginalization", "combinatorics", false,
       check_triple_marginalization},
      {"entropy-taylor", "combinatorics", false, check_entropy_taylor},
      {"crude-count-bound", "combinatorics", false, check_crude_count_bound},
      {"lambda-clt-bounds", "combinatorics", false, check_lambda_clt_bounds},
      {"marginalization-log", "combinatorics", true, check_marginalization_log},
      {"stirling-window", "combinatorics", true, check_stirling_window},
      {"limit-law-normalization", "laws", false,
       check_limit_law_normalization},
      {"levy-point-mass", "laws", false, check_levy_point_mass},
      {"levy-vs-ks", "laws", false, check_levy_vs_ks},
      {"levy-triangle", "laws", false, check_levy_triangle},
      {"empty-graph-law", "chains", false, check_empty_graph_law},
      {"gray-vs-direct-law", "chains", false, check_gray_vs_direct},
      {"full-graph-law-match", "chains", false, check_full_graph_law},
      {"detailed-balance", "chains", false, check_detailed_balance},
      {"glauber-determinism", "chains", false, check_glauber_determinism},
      {"glauber-beta0", "chains", false, check_glauber_beta0},
      {"mcmc-vs-exact-tv", "chains", false, check_mcmc_vs_exact},
      {"ess-diagnostic", "chains", false, check_ess_diagnostic},
      {"annealed-beta0", "annealed", false, check_annealed_beta0},
      {"annealed-n3-brute", "annealed", false, check_annealed_n3_brute},
      {"second-moment-guard", "annealed", false, check_second_moment_guard},
      {"hightemp-trend", "annealed", true, check_hightemp_trend},
      {"crit-diverging-trend", "annealed", true, check_crit_diverging_trend},
      {"crit-line-trend", "annealed", true, check_crit_line_trend},
      {"crit-vanishing-trend", "annealed", true, check_crit_vanishing_trend},
      {"g1-band", "annealed", true, check_g1_band},
      {"variance-trend", "annealed", true, check_variance_trend},
      {"quenched-experiment-shape", "quenched", false, check_quenched_shape},
      {"quenched-beta0-levy", "quenched", false, check_quenched_beta0},
      {"p1-ks-trend", "quenched", true, check_p1_ks_trend},
      {"quenched-levy-trend", "quenched", true, check_quenched_levy_trend},
  };
}

VerifySummary run_checks(VerifyLevel level, double a1_perturb, int threads,
                         const std::vector<std::string>& groups) {
  const CheckCtx ctx{a1_perturb, threads < 1 ? 1 : threads};
  VerifySummary summary;
  for (const CheckDef& def : make_checks()) {
    if (def.full_only && level == VerifyLevel::quick) continue;
    if (!groups.empty() &&
        std::find(groups.begin(), groups.end(), def.group) == groups.end())
      continue;
    Timer timer;
    VerifyCheck check;
    check.name = def.name;
    check.group = def.group;
    try {
      const CheckOutcome out = def.fn(ctx);
      check.pass = out.pass;
      check.detail = out.detail;
    } catch (const std::exception& e) {
      check.pass = false;
      check.detail = std::string("exception: ") + e.what();
    }
    check.seconds = timer.seconds();
    summary.all_pass = summary.all_pass && check.pass;
    summary.checks.push_back(std::move(check));
  }
  return summary;
}

}  // namespace

VerifySummary verify_suite(VerifyLevel level, double a1_perturbation,
                           int threads) {
  return run_checks(level, a1_perturbation, threads, {});
}

void print_verify_summary(const VerifySummary& summary, std::ostream& os) {
  int passed = 0;
  for (const VerifyCheck& c : summary.checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.group
       << ", " << std::fixed << std::setprecision(3) << c.seconds << "s) "
       << c.detail << "\n";
    if (c.pass) ++passed;
  }
  os << "verify: " << passed << "/" << summary.checks.size()
     << " checks passed" << (summary.all_pass ? "" : " -- FAILURES ABOVE")
     << "\n";
}

}  // namespace dcw
