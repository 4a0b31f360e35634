#include "dcw/annealed.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dcw/combinatorics.hpp"
#include "dcw/expansions.hpp"
#include "dcw/numerics.hpp"

namespace dcw {

namespace {

constexpr double kLog2 = 0.6931471805599453094;
constexpr double kLog2Pi = 1.8378770664093454836;

double log_add(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = x > y ? x : y;
  const double lo = x > y ? y : x;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

const std::vector<TestFunction>& test_function_registry() {
  static const std::vector<TestFunction> registry = {
      {"one", [](double) { return 1.0; }, 1.0},
      {"gauss", [](double x) { return std::exp(-x * x); }, 1.0},
      {"cauchy", [](double x) { return 1.0 / (1.0 + x * x); }, 1.0},
      {"bump",
       [](double x) {
         const double s = 1.0 - x * x;
         return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
       },
       std::exp(-1.0)},
  };
  return registry;
}

const TestFunction& test_function(std::string_view id) {
  for (const TestFunction& g : test_function_registry())
    if (g.id == id) return g;
  std::ostringstream msg;
  msg << "unknown test function id \"" << id << "\"; known ids:";
  for (const TestFunction& g : test_function_registry()) msg << ' ' << g.id;
  throw std::invalid_argument(msg.str());
}

double annealed_mean(const ModelParams& params, const TestFunction& g,
                     ScalingRule scale) {
  const int n = params.n;
  const SingleCoeffs a = coeffs_single(params.p, params.gamma());
  const double base = static_cast<double>(n) * n * a.a0;
  const double denom = scale_value(scale, n, params.p);

  LogSumAcc acc;
  for (long long k = -n; k <= n; k += 2) {
    const double gv = g.eval(static_cast<double>(k) / denom);
    if (!(gv > 0.0)) continue;
    acc.add(log_count_single(n, k) + base +
            a.a1 * static_cast<double>(k) * static_cast<double>(k) +
            std::log(gv));
  }
  return acc.value();
}

double mean_prediction(const ModelParams& params, const TestFunction& g,
                       Regime regime) {
  const double beta = params.beta;
  if (beta > 1.0)
    throw std::invalid_argument(
        "mean_prediction: beta > 1 has no supported limit");
  if (regime == Regime::high_temp && !(beta < 1.0))
    throw std::invalid_argument(
        "mean_prediction: the high-temperature form needs beta < 1");
  if (regime != Regime::high_temp && beta != 1.0)
    throw std::invalid_argument(
        "mean_prediction: the critical forms need beta == 1");

  const double n = static_cast<double>(params.n);
  switch (regime) {
    case Regime::high_temp: {
      // 2^N e^{-beta^2/8} E_xi[g(xi) e^{beta xi^2 / 2}], xi standard normal.
      const double integral = integrate(
          [&](double x) {
            return g.eval(x) * std::exp(-0.5 * (1.0 - beta) * x * x);
          },
          -30.0, 30.0);
      return n * kLog2 - beta * beta / 8.0 - 0.5 * kLog2Pi + std::log(integral);
    }
    case Regime::crit_diverging: {
      const double integral = integrate(
          [&](double x) {
            return g.eval(x) * std::exp(-x * x * x * x / 12.0);
          },
          -30.0, 30.0);
      return n * kLog2 + 0.25 * std::log(n) - 0.125 - 0.5 * kLog2Pi +
             std::log(integral);
    }
    case Regime::crit_line: {
      const double c = 1.0 / (params.p * params.p * std::pow(n, 1.5));
      const double integral = integrate(
          [&](double x) {
            return g.eval(x) *
                   std::exp(-c * x * x / 24.0 - x * x * x * x / 12.0);
          },
          -30.0, 30.0);
      return n * kLog2 + 0.25 * std::log(n) - 0.125 - 0.5 * kLog2Pi +
             std::log(integral);
    }
    case Regime::crit_vanishing: {
      const double integral = integrate(
          [&](double x) { return g.eval(x) * std::exp(-x * x / 24.0); },
          -30.0, 30.0);
      return n * kLog2 + std::log(n * params.p) - 0.125 - 0.5 * kLog2Pi +
             std::log(integral);
    }
  }
  throw std::logic_error("mean_prediction: unreachable");
}

double annealed_second_moment(const ModelParams& params, const TestFunction& g,
                              ScalingRule scale, int n_guard, int threads) {
  const int n = params.n;
  if (n > n_guard) {
    const double lattice = 0.5 * (n + 1.0) * (n + 1.0) * (n + 1.0);
    std::ostringstream msg;
    msg.precision(3);
    msg << "annealed_second_moment: N=" << n << " exceeds the guard "
        << n_guard << "; the (k,l,m) sum has about " << std::scientific
        << lattice << " parity-admissible terms before symmetry folding. "
        << "Raise n_guard to proceed anyway.";
    throw std::invalid_argument(msg.str());
  }
  if (threads < 1) threads = 1;
  if (threads > n + 1) threads = n + 1;

  const PairCoeffs b = coeffs_pair(params.p, params.gamma());
  const double base = static_cast<double>(n) * n * b.b0;
  const double denom = scale_value(scale, n, params.p);
  const LogFactorialTable lf(n);

  // Canonical cells k <= l, k + l >= 0 represent the orbits of
  // (k,l,m) -> (l,k,m) and (k,l,m) -> (-k,-l,m); the overlap m is invariant
  // under both, nu and the quadratic weight likewise, and g is even. The
  // orbit sizes give the multiplicity below. No m-sign fold exists: nu(k,l,m)
  // and nu(k,l,-m) differ in general.
  const auto slice_value = [&](long long k) -> double {
    const double gk = g.eval(static_cast<double>(k) / denom);
    if (!(gk > 0.0)) return kNegInf;
    const double log_gk = std::log(gk);
    LogSumAcc acc;
    for (long long l = std::llabs(k); l <= n; l += 2) {
      const double gl = g.eval(static_cast<double>(l) / denom);
      if (!(gl > 0.0)) continue;
      const double mult = (k < l ? 2.0 : 1.0) * (k + l > 0 ? 2.0 : 1.0);
      const double cell =
          base +
          b.b1 * (static_cast<double>(k) * k + static_cast<double>(l) * l) +
          log_gk + std::log(gl) + std::log(mult);
      // m runs over the admissible window with 4 | (n + k + l + m).
      const long long m_lo = std::llabs(k + l) - n;
      const long long m_hi = n - std::llabs(k - l);
      const long long r = (((-(n + k + l)) % 4) + 4) % 4;
      long long m = m_lo + ((((r - m_lo) % 4) + 4) % 4);
      for (; m <= m_hi; m += 4) {
        acc.add(cell + log_count_triple(lf, n, k, l, m) +
                b.b12 * static_cast<double>(m) * static_cast<double>(m));
      }
    }
    return acc.value();
  };

  std::vector<long long> ks;
  ks.reserve(static_cast<size_t>(n) + 1);
  for (long long k = -n; k <= n; k += 2) ks.push_back(k);

  std::vector<double> slice(ks.size(), kNegInf);
  if (threads == 1) {
    for (size_t i = 0; i < ks.size(); ++i) slice[i] = slice_value(ks[i]);
  } else {
    std::atomic<size_t> next{0};
    const auto worker = [&] {
      for (size_t i; (i = next.fetch_add(1)) < ks.size();)
        slice[i] = slice_value(ks[i]);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  }

  // Pairwise tree over the fixed slice order.
  std::vector<double> level = std::move(slice);
  while (level.size() > 1) {
    std::vector<double> up((level.size() + 1) / 2);
    for (size_t i = 0; i < up.size(); ++i) {
      const size_t j = 2 * i;
      up[i] = log_add(level[j], j + 1 < level.size() ? level[j + 1] : kNegInf);
    }
    level = std::move(up);
  }
  return level.front();
}

double variance_ratio_from_logs(double log_mean, double log_second) {
  if (!std::isfinite(log_mean))
    throw std::runtime_error(
        "variance_ratio: annealed mean vanished, ratio undefined");
  const double ratio = std::expm1(log_second - 2.0 * log_mean);
  if (ratio < -1e-9) {
    std::ostringstream msg;
    msg << "variance_ratio: E Z^2 < (E Z)^2 beyond rounding tolerance (ratio "
        << ratio << ")";
    throw std::runtime_error(msg.str());
  }
  return ratio < 0.0 ? 0.0 : ratio;
}

double variance_ratio(const ModelParams& params, const TestFunction& g,
                      ScalingRule scale, int n_guard, int threads) {
  const double l1 = annealed_mean(params, g, scale);
  const double l2 = annealed_second_moment(params, g, scale, n_guard, threads);
  return variance_ratio_from_logs(l1, l2);
}

}  // namespace dcw
