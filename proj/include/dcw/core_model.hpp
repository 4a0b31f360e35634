#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dcw {

/// Model parameters for the dilute mean-field Ising system on a directed
/// Erdos-Renyi graph with loops. The coupling in the Hamiltonian is
/// normalized by 2*N*p, and gamma = beta / (2*N*p) is the tilt parameter
/// used throughout.
struct ModelParams {
  int n;
  double p;
  double beta;

  ModelParams(int n_, double p_, double beta_);
  double gamma() const { return beta / (2.0 * n * p); }
};

/// Scaling denominators for the magnetization: sqrt(N), N^(3/4), sqrt(N^3 p^2).
enum class ScalingRule { sqrt_n, n34, n32p };

double scale_value(ScalingRule rule, int n, double p);
std::string scaling_name(ScalingRule rule);

/// Limit regimes. high_temp is beta < 1; the three critical tags are beta = 1
/// distinguished by the behavior of p^4 N^3 (diverging, pinned to a finite
/// constant 1/c^2, or vanishing with pN still diverging).
enum class Regime { high_temp, crit_diverging, crit_line, crit_vanishing };

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);

/// Spin configuration over {-1,+1}^N with a cached total magnetization.
class SpinConfig {
 public:
  explicit SpinConfig(int n, int fill = +1);

  /// Spins from the low n bits of `bits`: bit i set means s_i = +1.
  static SpinConfig from_bits(int n, std::uint64_t bits);

  int n() const { return static_cast<int>(s_.size()); }
  int spin(int i) const { return s_[static_cast<size_t>(i)]; }
  void set(int i, int value);
  void flip(int i);
  long long magnetization() const { return m_; }
  std::span<const signed char> spins() const { return s_; }

 private:
  std::vector<signed char> s_;
  long long m_;
};

long long overlap(const SpinConfig& sigma, const SpinConfig& tau);

/// A sampled realization of the directed edge indicators eps_{i,j}, i.e. the
/// disorder. Ordered pairs, loops allowed. Representation is a dense
/// bit-matrix for p >= 0.05 and sorted out-adjacency lists otherwise; both
/// are filled from the same geometric-skip stream over the flattened index
/// space, so (n, p, seed) determines the edge set no matter which
/// representation is in use.
class DisorderGraph {
 public:
  enum class Rep { auto_select, dense, sparse };

  DisorderGraph(const ModelParams& params, std::uint64_t seed,
                Rep rep = Rep::auto_select);

  int n() const { return n_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  bool dense() const { return dense_; }
  std::uint64_t edge_count() const { return edge_count_; }

  bool has_edge(int i, int j) const;
  void for_each_edge(const std::function<void(int, int)>& visit) const;

  /// Sum over ordered pairs of eps_{i,j} s_i s_j, loops included.
  long long interaction_sum(const SpinConfig& sigma) const;

  /// Debug export: "N p seed" header line, then "i j" per edge, 0-based,
  /// lexicographically sorted.
  void write_edges(std::ostream& os) const;

 private:
  int n_;
  double p_;
  std::uint64_t seed_;
  bool dense_;
  std::uint64_t edge_count_ = 0;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;      // dense
  std::vector<std::uint64_t> offsets_;   // sparse CSR
  std::vector<std::int32_t> targets_;
};

DisorderGraph sample_graph(const ModelParams& params, std::uint64_t seed);

/// H(sigma) = -(1/(2Np)) sum_{i,j} eps_{i,j} s_i s_j.
double hamiltonian(const DisorderGraph& graph, const SpinConfig& sigma,
                   const ModelParams& params);

/// log T(sigma) = gamma * interaction_sum - log(cosh gamma) * edge_count.
double log_t_statistic(const DisorderGraph& graph, const SpinConfig& sigma,
                       const ModelParams& params);

/// Symmetrized neighbor structure w_{ij} = eps_{ij} + eps_{ji} for i != j,
/// used by the dynamics and the exact enumerator. Loops drop out because the
/// diagonal contributes a spin-independent constant.
struct SymAdjacency {
  struct Entry {
    std::int32_t j;
    std::int8_t w;  // 1 or 2
  };
  std::vector<std::uint64_t> offsets;
  std::vector<Entry> entries;

  static SymAdjacency build(const DisorderGraph& graph);
  std::span<const Entry> row(int i) const {
    return {entries.data() + offsets[static_cast<size_t>(i)],
            entries.data() + offsets[static_cast<size_t>(i) + 1]};
  }
};

}  // namespace dcw
