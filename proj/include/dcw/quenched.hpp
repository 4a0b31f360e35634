#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcw/core_model.hpp"
#include "dcw/limits_stats.hpp"
#include "dcw/numerics.hpp"

namespace dcw {

/// Glauber chain run lengths. burn_in left negative resolves to the default
/// 10 * N sweeps at run time; thinning is the number of sweeps between
/// recorded samples.
struct ChainConfig {
  long long sweeps = 0;
  long long burn_in = -1;
  long long thinning = 1;
  std::uint64_t seed = 0;

  /// Copy with burn_in resolved for the given N and the invariants checked
  /// (sweeps > 0, 0 <= burn_in < sweeps, thinning >= 1). Throws
  /// std::invalid_argument listing every violated field.
  ChainConfig resolved(int n) const;
};

/// Exact scaled-magnetization law of the Gibbs measure: atoms at M / scale,
/// weight of each magnetization class summed over its 2^N spin
/// configurations by Gray-code enumeration with incremental interaction
/// updates. Guarded at N <= 24, except that p == 1 routes to the O(N)
/// complete-graph form at any N. Throws std::invalid_argument over the
/// guard.
EmpiricalLaw exact_law(const DisorderGraph& graph, double beta,
                       ScalingRule scale);

/// The p = 1 law without materializing a graph: every ordered pair is
/// present, the interaction sum is M^2, so the class weights are
/// nu_N(k) exp(beta k^2 / (2N)). O(N).
EmpiricalLaw full_graph_law(int n, double beta, ScalingRule scale);

/// Single-site heat-bath dynamics. Each sweep visits all sites in a fresh
/// uniformly random order; site i is set to +1 with probability
/// 1 / (1 + exp(-2 beta h_i)) where h_i = (1/(2Np)) sum_{j != i}
/// (eps_{ij} + eps_{ji}) s_j. Diagonal terms are spin-independent and
/// excluded. Returns the magnetizations recorded after burn-in, every
/// `thinning` sweeps. Deterministic for a fixed (graph, cfg).
std::vector<long long> glauber_chain(const DisorderGraph& graph, double beta,
                                     const ChainConfig& cfg);

/// Full 2^N x 2^N transition matrix of the random-scan heat-bath kernel
/// (site chosen uniformly, then updated as in glauber_chain). Row-stochastic.
/// For the detailed-balance check; guarded at N <= 10. State index bit i set
/// means s_i = +1.
std::vector<std::vector<double>> transition_matrix(const DisorderGraph& graph,
                                                   double beta);

/// Effective sample size of a scalar chain via the integrated
/// autocorrelation time with Geyer initial-positive-sequence truncation:
/// lag pairs Gamma_k = gamma_{2k} + gamma_{2k+1} are summed while positive.
/// Degenerate chains (zero variance) report their length.
double effective_sample_size(std::span<const double> samples);

enum class SampleMethod { exact, mcmc };

std::string method_name(SampleMethod m);
SampleMethod method_from_name(const std::string& name);

struct ReplicaRecord {
  std::uint64_t graph_seed = 0;
  double levy = 0.0;
  double ks = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  double ess = 0.0;  // NaN on the exact path
};

struct ReplicaAggregate {
  Quartiles levy;
  Quartiles ks;
  Quartiles m2;
  Quartiles m4;
};

struct ReplicaReport {
  ModelParams params;
  Regime regime;
  SampleMethod method;
  std::vector<ReplicaRecord> replicas;
  ReplicaAggregate aggregate;
};

/// Replica experiment: for each replica, sample a disorder graph from seed
/// child_seed(cfg.seed, replica, 0), compute the scaled magnetization law
/// (exactly, or from a Glauber chain seeded child_seed(cfg.seed, replica, 1)
/// and symmetrized), and measure Levy and KS distances to
/// predicted_limit(beta, regime) plus second and fourth moments. Aggregates
/// are quartiles over replicas. Replicas run on `threads` threads; records
/// land in fixed slots, so the report does not depend on the thread count.
///
/// Errors: regime inconsistent with beta, exact method above the N <= 24
/// guard with p < 1, invalid chain config, or replicas < 1.
ReplicaReport quenched_levy_experiment(const ModelParams& params,
                                       Regime regime, int replicas,
                                       SampleMethod method,
                                       const ChainConfig& cfg,
                                       int threads = 1);

}  // namespace dcw
