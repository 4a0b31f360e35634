#include "dcw/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "dcw/numerics.hpp"
#include "dcw/rng.hpp"

namespace dcw {

namespace {

constexpr double kDenseThreshold = 0.05;
// Memory guard for the bit-matrix: n^2 bits at n = 16384 is 32 MB.
constexpr int kDenseMaxN = 16384;

// Walks the flattened n*n index space with geometric skips, visiting each
// position independently with probability p. Every representation consumes
// this same stream, which is what makes the edge set a function of
// (n, p, seed) alone.
template <class Emit>
void sample_edge_stream(int n, double p, std::uint64_t seed, Emit&& emit) {
  const std::uint64_t total =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  if (p >= 1.0) {
    for (std::uint64_t idx = 0; idx < total; ++idx) emit(idx);
    return;
  }
  Rng rng(seed);
  const double log_q = std::log1p(-p);
  std::uint64_t idx = 0;
  while (idx < total) {
    const double u = uniform01(rng);
    const double skip = std::floor(std::log1p(-u) / log_q);
    const double remaining = static_cast<double>(total - idx);
    if (!(skip < remaining)) break;
    idx += static_cast<std::uint64_t>(skip);
    emit(idx);
    ++idx;
  }
}

}  // namespace

ModelParams::ModelParams(int n_, double p_, double beta_) : n(n_), p(p_), beta(beta_) {
  std::string bad;
  if (n < 1) bad += "N must be a positive integer; ";
  if (!(p > 0.0 && p <= 1.0)) bad += "p must lie in (0, 1]; ";
  if (!(beta >= 0.0) || !std::isfinite(beta)) bad += "beta must be finite and >= 0; ";
  if (!bad.empty()) throw std::invalid_argument("ModelParams: " + bad);
}

double scale_value(ScalingRule rule, int n, double p) {
  switch (rule) {
    case ScalingRule::sqrt_n:
      return std::sqrt(static_cast<double>(n));
    case ScalingRule::n34:
      return std::pow(static_cast<double>(n), 0.75);
    case ScalingRule::n32p:
      return std::pow(static_cast<double>(n), 1.5) * p;
  }
  throw std::logic_error("scale_value: bad rule");
}

std::string scaling_name(ScalingRule rule) {
  switch (rule) {
    case ScalingRule::sqrt_n:
      return "sqrtN";
    case ScalingRule::n34:
      return "N34";
    case ScalingRule::n32p:
      return "N32p";
  }
  return "?";
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::high_temp:
      return "high-temp";
    case Regime::crit_diverging:
      return "crit-diverging";
    case Regime::crit_line:
      return "crit-line";
    case Regime::crit_vanishing:
      return "crit-vanishing";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "high-temp") return Regime::high_temp;
  if (name == "crit-diverging") return Regime::crit_diverging;
  if (name == "crit-line") return Regime::crit_line;
  if (name == "crit-vanishing") return Regime::crit_vanishing;
  throw std::invalid_argument(
      "unknown regime '" + name +
      "' (expected high-temp | crit-diverging | crit-line | crit-vanishing)");
}

SpinConfig::SpinConfig(int n, int fill) {
  if (n < 1) throw std::invalid_argument("SpinConfig: N must be positive");
  if (fill != 1 && fill != -1)
    throw std::invalid_argument("SpinConfig: fill must be +1 or -1");
  s_.assign(static_cast<size_t>(n), static_cast<signed char>(fill));
  m_ = static_cast<long long>(n) * fill;
}

SpinConfig SpinConfig::from_bits(int n, std::uint64_t bits) {
  if (n < 1 || n > 64) throw std::invalid_argument("SpinConfig::from_bits: N must be in 1..64");
  SpinConfig cfg(n, -1);
  for (int i = 0; i < n; ++i)
    if ((bits >> i) & 1u) cfg.set(i, +1);
  return cfg;
}

void SpinConfig::set(int i, int value) {
  if (value != 1 && value != -1)
    throw std::invalid_argument("SpinConfig::set: value must be +1 or -1");
  auto& cell = s_[static_cast<size_t>(i)];
  m_ += value - cell;
  cell = static_cast<signed char>(value);
}

void SpinConfig::flip(int i) {
  auto& cell = s_[static_cast<size_t>(i)];
  m_ -= 2 * cell;
  cell = static_cast<signed char>(-cell);
}

long long overlap(const SpinConfig& sigma, const SpinConfig& tau) {
  if (sigma.n() != tau.n())
    throw std::invalid_argument("overlap: length mismatch");
  long long s = 0;
  for (int i = 0; i < sigma.n(); ++i)
    s += static_cast<long long>(sigma.spin(i)) * tau.spin(i);
  return s;
}

DisorderGraph::DisorderGraph(const ModelParams& params, std::uint64_t seed, Rep rep)
    : n_(params.n), p_(params.p), seed_(seed) {
  switch (rep) {
    case Rep::auto_select:
      dense_ = (p_ >= kDenseThreshold) && (n_ <= kDenseMaxN);
      break;
    case Rep::dense:
      dense_ = true;
      break;
    case Rep::sparse:
      dense_ = false;
      break;
  }
  if (dense_ && n_ > kDenseMaxN)
    throw std::invalid_argument("DisorderGraph: dense representation capped at N = " +
                                std::to_string(kDenseMaxN));
  if (dense_) {
    words_per_row_ = (n_ + 63) / 64;
    bits_.assign(static_cast<size_t>(n_) * words_per_row_, 0);
    sample_edge_stream(n_, p_, seed, [&](std::uint64_t idx) {
      const auto i = static_cast<size_t>(idx / static_cast<std::uint64_t>(n_));
      const auto j = static_cast<size_t>(idx % static_cast<std::uint64_t>(n_));
      bits_[i * words_per_row_ + j / 64] |= std::uint64_t{1} << (j % 64);
      ++edge_count_;
    });
  } else {
    offsets_.assign(static_cast<size_t>(n_) + 1, 0);
    sample_edge_stream(n_, p_, seed, [&](std::uint64_t idx) {
      const auto i = static_cast<size_t>(idx / static_cast<std::uint64_t>(n_));
      const auto j = static_cast<std::int32_t>(idx % static_cast<std::uint64_t>(n_));
      targets_.push_back(j);
      offsets_[i + 1] = targets_.size();
      ++edge_count_;
    });
    for (size_t i = 1; i < offsets_.size(); ++i)
      offsets_[i] = std::max(offsets_[i], offsets_[i - 1]);
  }
}

DisorderGraph sample_graph(const ModelParams& params, std::uint64_t seed) {
  return DisorderGraph(params, seed);
}

bool DisorderGraph::has_edge(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return false;
  if (dense_) {
    const std::uint64_t word =
        bits_[static_cast<size_t>(i) * words_per_row_ + static_cast<size_t>(j) / 64];
    return (word >> (j % 64)) & 1u;
  }
  const auto begin = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto end = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  return std::binary_search(begin, end, j);
}

void DisorderGraph::for_each_edge(const std::function<void(int, int)>& visit) const {
  if (dense_) {
    for (int i = 0; i < n_; ++i) {
      const std::uint64_t* row = bits_.data() + static_cast<size_t>(i) * words_per_row_;
      for (int w = 0; w < words_per_row_; ++w) {
        std::uint64_t word = row[w];
        while (word) {
          const int bit = std::countr_zero(word);
          visit(i, w * 64 + bit);
          word &= word - 1;
        }
      }
    }
  } else {
    for (int i = 0; i < n_; ++i)
      for (std::uint64_t e = offsets_[i]; e < offsets_[i + 1]; ++e)
        visit(i, targets_[static_cast<size_t>(e)]);
  }
}

long long DisorderGraph::interaction_sum(const SpinConfig& sigma) const {
  if (sigma.n() != n_)
    throw std::invalid_argument("interaction_sum: spin length mismatch");
  long long total = 0;
  if (dense_) {
    // Pack sigma into a +1 bitmask once, then each row costs two popcounts
    // per word: sum_j eps_ij s_j = 2*|row & plus| - |row|.
    std::vector<std::uint64_t> plus(static_cast<size_t>(words_per_row_), 0);
    for (int j = 0; j < n_; ++j)
      if (sigma.spin(j) > 0)
        plus[static_cast<size_t>(j) / 64] |= std::uint64_t{1} << (j % 64);
    for (int i = 0; i < n_; ++i) {
      const std::uint64_t* row = bits_.data() + static_cast<size_t>(i) * words_per_row_;
      long long row_dot = 0;
      for (int w = 0; w < words_per_row_; ++w) {
        row_dot += 2LL * std::popcount(row[w] & plus[static_cast<size_t>(w)]) -
                   std::popcount(row[w]);
      }
      total += sigma.spin(i) * row_dot;
    }
  } else {
    for (int i = 0; i < n_; ++i) {
      long long row_dot = 0;
      for (std::uint64_t e = offsets_[i]; e < offsets_[i + 1]; ++e)
        row_dot += sigma.spin(targets_[static_cast<size_t>(e)]);
      total += sigma.spin(i) * row_dot;
    }
  }
  return total;
}

void DisorderGraph::write_edges(std::ostream& os) const {
  os << n_ << ' ' << std::setprecision(17) << p_ << ' ' << seed_ << '\n';
  for_each_edge([&os](int i, int j) { os << i << ' ' << j << '\n'; });
}

double hamiltonian(const DisorderGraph& graph, const SpinConfig& sigma,
                   const ModelParams& params) {
  if (graph.n() != params.n || sigma.n() != params.n)
    throw std::invalid_argument("hamiltonian: dimension mismatch");
  return -static_cast<double>(graph.interaction_sum(sigma)) /
         (2.0 * params.n * params.p);
}

double log_t_statistic(const DisorderGraph& graph, const SpinConfig& sigma,
                       const ModelParams& params) {
  if (graph.n() != params.n || sigma.n() != params.n)
    throw std::invalid_argument("t_statistic: dimension mismatch");
  const double gamma = params.gamma();
  return gamma * static_cast<double>(graph.interaction_sum(sigma)) -
         log_cosh(gamma) * static_cast<double>(graph.edge_count());
}

SymAdjacency SymAdjacency::build(const DisorderGraph& graph) {
  const int n = graph.n();
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  graph.for_each_edge([&pairs](int i, int j) {
    if (i != j) pairs.emplace_back(std::min(i, j), std::max(i, j));
  });
  std::sort(pairs.begin(), pairs.end());

  SymAdjacency adj;
  adj.offsets.assign(static_cast<size_t>(n) + 1, 0);
  // First pass: undirected degree of every vertex.
  for (size_t e = 0; e < pairs.size();) {
    size_t f = e;
    while (f < pairs.size() && pairs[f] == pairs[e]) ++f;
    adj.offsets[static_cast<size_t>(pairs[e].first) + 1]++;
    adj.offsets[static_cast<size_t>(pairs[e].second) + 1]++;
    e = f;
  }
  for (size_t i = 1; i < adj.offsets.size(); ++i) adj.offsets[i] += adj.offsets[i - 1];
  adj.entries.resize(adj.offsets.back());
  std::vector<std::uint64_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (size_t e = 0; e < pairs.size();) {
    size_t f = e;
    while (f < pairs.size() && pairs[f] == pairs[e]) ++f;
    const auto w = static_cast<std::int8_t>(f - e);
    const auto a = pairs[e].first;
    const auto b = pairs[e].second;
    adj.entries[cursor[static_cast<size_t>(a)]++] = Entry{b, w};
    adj.entries[cursor[static_cast<size_t>(b)]++] = Entry{a, w};
    e = f;
  }
  return adj;
}

}  // namespace dcw
