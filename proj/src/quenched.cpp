#include "dcw/quenched.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dcw/combinatorics.hpp"
#include "dcw/rng.hpp"

namespace dcw {

namespace {

double prob_plus(double beta, double h) {
  return 1.0 / (1.0 + std::exp(-2.0 * beta * h));
}

}  // namespace

ChainConfig ChainConfig::resolved(int n) const {
  ChainConfig r = *this;
  if (r.burn_in < 0) r.burn_in = 10LL * n;
  std::string violations;
  if (r.sweeps <= 0) violations += " sweeps must be positive;";
  if (r.thinning < 1) violations += " thinning must be >= 1;";
  if (r.sweeps > 0 && r.burn_in >= r.sweeps)
    violations += " burn_in must be < sweeps;";
  if (!violations.empty())
    throw std::invalid_argument("ChainConfig:" + violations);
  return r;
}

EmpiricalLaw full_graph_law(int n, double beta, ScalingRule scale) {
  const double denom = scale_value(scale, n, 1.0);
  std::vector<double> atoms(static_cast<size_t>(n) + 1);
  std::vector<double> logw(static_cast<size_t>(n) + 1);
  for (int idx = 0; idx <= n; ++idx) {
    const long long k = 2LL * idx - n;
    atoms[static_cast<size_t>(idx)] = static_cast<double>(k) / denom;
    logw[static_cast<size_t>(idx)] =
        log_count_single(n, k) +
        beta * static_cast<double>(k) * static_cast<double>(k) / (2.0 * n);
  }
  return EmpiricalLaw::from_log_weights(std::move(atoms), std::move(logw));
}

EmpiricalLaw exact_law(const DisorderGraph& graph, double beta,
                       ScalingRule scale) {
  const int n = graph.n();
  if (graph.p() == 1.0) return full_graph_law(n, beta, scale);
  if (n > 24) {
    std::ostringstream msg;
    msg << "exact_law: N=" << n
        << " exceeds the 2^N enumeration guard (24); use the chain sampler";
    throw std::invalid_argument(msg.str());
  }

  const SymAdjacency adj = SymAdjacency::build(graph);
  std::vector<std::uint32_t> mask_all(static_cast<size_t>(n), 0);
  std::vector<std::uint32_t> mask_two(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (const SymAdjacency::Entry& e : adj.row(i)) {
      mask_all[static_cast<size_t>(i)] |= 1u << e.j;
      if (e.w == 2) mask_two[static_cast<size_t>(i)] |= 1u << e.j;
    }
  }

  long long diag = 0;
  for (int i = 0; i < n; ++i)
    if (graph.has_edge(i, i)) ++diag;
  const long long e_off = static_cast<long long>(graph.edge_count()) - diag;

  // counts[(M+n)/2][S_off + e_off]: states per (magnetization class,
  // off-diagonal interaction sum). Counting first in exact integers and
  // exponentiating per bin afterwards keeps the result independent of the
  // enumeration order.
  std::vector<std::vector<unsigned long long>> counts(
      static_cast<size_t>(n) + 1,
      std::vector<unsigned long long>(static_cast<size_t>(2 * e_off) + 1, 0));

  std::uint32_t plus = 0;  // all spins -1
  long long s_off = e_off;
  long long mag = -n;
  counts[0][static_cast<size_t>(s_off + e_off)]++;

  const std::uint64_t total = 1ull << n;
  for (std::uint64_t x = 1; x < total; ++x) {
    const int b = std::countr_zero(x);
    const std::uint32_t ma = mask_all[static_cast<size_t>(b)];
    const std::uint32_t mt = mask_two[static_cast<size_t>(b)];
    const long long dot =
        (2LL * std::popcount(plus & ma) - std::popcount(ma)) +
        (2LL * std::popcount(plus & mt) - std::popcount(mt));
    const long long sb = (plus >> b) & 1u ? +1 : -1;
    s_off -= 2LL * sb * dot;
    plus ^= 1u << b;
    mag += (plus >> b) & 1u ? 2 : -2;
    counts[static_cast<size_t>((mag + n) / 2)]
          [static_cast<size_t>(s_off + e_off)]++;
  }

  const double coupling = beta / (2.0 * n * graph.p());
  const double denom = scale_value(scale, n, graph.p());
  std::vector<double> atoms(static_cast<size_t>(n) + 1);
  std::vector<double> logw(static_cast<size_t>(n) + 1);
  for (int idx = 0; idx <= n; ++idx) {
    LogSumAcc acc;
    const auto& row = counts[static_cast<size_t>(idx)];
    for (size_t s = 0; s < row.size(); ++s) {
      if (row[s] == 0) continue;
      const long long s_val = static_cast<long long>(s) - e_off + diag;
      acc.add(std::log(static_cast<double>(row[s])) +
              coupling * static_cast<double>(s_val));
    }
    atoms[static_cast<size_t>(idx)] = (2.0 * idx - n) / denom;
    logw[static_cast<size_t>(idx)] = acc.value();
  }
  return EmpiricalLaw::from_log_weights(std::move(atoms), std::move(logw));
}

std::vector<long long> glauber_chain(const DisorderGraph& graph, double beta,
                                     const ChainConfig& cfg) {
  const int n = graph.n();
  const ChainConfig rc = cfg.resolved(n);
  const SymAdjacency adj = SymAdjacency::build(graph);
  const double coupling = 1.0 / (2.0 * n * graph.p());

  Rng rng(rc.seed);
  std::vector<signed char> s(static_cast<size_t>(n));
  long long mag = 0;
  for (int i = 0; i < n; ++i) {
    s[static_cast<size_t>(i)] = uniform01(rng) < 0.5 ? -1 : +1;
    mag += s[static_cast<size_t>(i)];
  }

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<long long> out;
  out.reserve(
      static_cast<size_t>((rc.sweeps - rc.burn_in) / rc.thinning + 1));
  for (long long sweep = 1; sweep <= rc.sweeps; ++sweep) {
    portable_shuffle(order, rng);
    for (int i : order) {
      long long dot = 0;
      for (const SymAdjacency::Entry& e : adj.row(i))
        dot += e.w * s[static_cast<size_t>(e.j)];
      const double h = coupling * static_cast<double>(dot);
      const signed char val =
          uniform01(rng) < prob_plus(beta, h) ? +1 : -1;
      if (val != s[static_cast<size_t>(i)]) {
        mag += 2 * val;
        s[static_cast<size_t>(i)] = val;
      }
    }
    if (sweep > rc.burn_in && (sweep - rc.burn_in) % rc.thinning == 0)
      out.push_back(mag);
  }
  return out;
}

std::vector<std::vector<double>> transition_matrix(const DisorderGraph& graph,
                                                   double beta) {
  const int n = graph.n();
  if (n > 10)
    throw std::invalid_argument(
        "transition_matrix: the full-kernel check is guarded at N <= 10");
  const SymAdjacency adj = SymAdjacency::build(graph);
  const double coupling = 1.0 / (2.0 * n * graph.p());
  const size_t states = 1ull << n;

  std::vector<std::vector<double>> pmat(states,
                                        std::vector<double>(states, 0.0));
  for (size_t state = 0; state < states; ++state) {
    for (int i = 0; i < n; ++i) {
      long long dot = 0;
      for (const SymAdjacency::Entry& e : adj.row(i)) {
        const int sj = (state >> e.j) & 1u ? +1 : -1;
        dot += e.w * sj;
      }
      const double pp = prob_plus(beta, coupling * static_cast<double>(dot));
      const size_t up = state | (1ull << i);
      const size_t down = state & ~(1ull << i);
      pmat[state][up] += pp / n;
      pmat[state][down] += (1.0 - pp) / n;
    }
  }
  return pmat;
}

double effective_sample_size(std::span<const double> samples) {
  const size_t n = samples.size();
  if (n < 2) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);

  const auto gamma = [&](size_t t) {
    double s = 0.0;
    for (size_t i = 0; i + t < n; ++i)
      s += (samples[i] - mean) * (samples[i + t] - mean);
    return s / static_cast<double>(n);
  };

  const double g0 = gamma(0);
  if (!(g0 > 0.0)) return static_cast<double>(n);
  double sig2 = -g0;
  for (size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = gamma(2 * k) + gamma(2 * k + 1);
    if (pair <= 0.0) break;
    sig2 += 2.0 * pair;
  }
  if (!(sig2 > 0.0)) return static_cast<double>(n);
  return static_cast<double>(n) * g0 / sig2;
}

std::string method_name(SampleMethod m) {
  return m == SampleMethod::exact ? "exact" : "mcmc";
}

SampleMethod method_from_name(const std::string& name) {
  if (name == "exact") return SampleMethod::exact;
  if (name == "mcmc") return SampleMethod::mcmc;
  throw std::invalid_argument("unknown sampling method \"" + name +
                              "\" (want exact or mcmc)");
}

ReplicaReport quenched_levy_experiment(const ModelParams& params,
                                       Regime regime, int replicas,
                                       SampleMethod method,
                                       const ChainConfig& cfg, int threads) {
  if (replicas < 1)
    throw std::invalid_argument(
        "quenched_levy_experiment: replicas must be >= 1");
  const double c =
      regime == Regime::crit_line ? critical_line_c(params) : 0.0;
  const PredictedLimit pred = predicted_limit(params.beta, regime, c);
  if (method == SampleMethod::exact && params.n > 24 && params.p != 1.0)
    throw std::invalid_argument(
        "quenched_levy_experiment: exact method needs N <= 24 unless p = 1");
  if (method == SampleMethod::mcmc) {
    const ChainConfig rc = cfg.resolved(params.n);
    if ((rc.sweeps - rc.burn_in) / rc.thinning < 1)
      throw std::invalid_argument(
          "quenched_levy_experiment: chain would record no samples; raise "
          "sweeps or lower thinning");
  }

  const double denom = scale_value(pred.scale, params.n, params.p);
  std::vector<ReplicaRecord> records(static_cast<size_t>(replicas));

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto run_replica = [&](int r) {
    const std::uint64_t graph_seed = child_seed(cfg.seed, static_cast<std::uint64_t>(r), 0);
    double ess = std::numeric_limits<double>::quiet_NaN();
    const auto make_law = [&]() -> EmpiricalLaw {
      if (method == SampleMethod::exact) {
        if (params.p == 1.0)
          return full_graph_law(params.n, params.beta, pred.scale);
        const DisorderGraph graph(params, graph_seed);
        return exact_law(graph, params.beta, pred.scale);
      }
      const DisorderGraph graph(params, graph_seed);
      ChainConfig chain_cfg = cfg;
      chain_cfg.seed = child_seed(cfg.seed, static_cast<std::uint64_t>(r), 1);
      const std::vector<long long> ms =
          glauber_chain(graph, params.beta, chain_cfg);
      std::vector<double> series(ms.size());
      for (size_t i = 0; i < ms.size(); ++i)
        series[i] = static_cast<double>(ms[i]);
      ess = effective_sample_size(series);
      std::vector<double> atoms(static_cast<size_t>(params.n) + 1);
      std::vector<double> weights(static_cast<size_t>(params.n) + 1, 0.0);
      for (int idx = 0; idx <= params.n; ++idx)
        atoms[static_cast<size_t>(idx)] = (2.0 * idx - params.n) / denom;
      for (long long m : ms)
        weights[static_cast<size_t>((m + params.n) / 2)] += 1.0;
      return EmpiricalLaw(std::move(atoms), std::move(weights)).symmetrized();
    };
    const EmpiricalLaw law = make_law();
    ReplicaRecord& rec = records[static_cast<size_t>(r)];
    rec.graph_seed = graph_seed;
    rec.levy = distance(Metric::levy, law, pred.law);
    rec.ks = distance(Metric::ks, law, pred.law);
    rec.m2 = law.moment(2);
    rec.m4 = law.moment(4);
    rec.ess = ess;
  };

  const auto worker = [&] {
    for (int r; (r = next.fetch_add(1)) < replicas;) {
      try {
        run_replica(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (threads < 1) threads = 1;
  if (threads > replicas) threads = replicas;
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<double> levies, kss, m2s, m4s;
  levies.reserve(records.size());
  kss.reserve(records.size());
  m2s.reserve(records.size());
  m4s.reserve(records.size());
  int low_ess = 0;
  for (const ReplicaRecord& rec : records) {
    levies.push_back(rec.levy);
    kss.push_back(rec.ks);
    m2s.push_back(rec.m2);
    m4s.push_back(rec.m4);
    if (method == SampleMethod::mcmc && rec.ess < 1000.0) ++low_ess;
  }
  if (low_ess > 0)
    std::cerr << "warning: " << low_ess << " of " << replicas
              << " chains have effective sample size below 1000\n";

  const ReplicaAggregate agg{quartiles(levies), quartiles(kss),
                             quartiles(m2s), quartiles(m4s)};
  return ReplicaReport{params, regime, method, std::move(records), agg};
}

}  // namespace dcw
