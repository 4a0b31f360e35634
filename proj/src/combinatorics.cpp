#include "dcw/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace dcw {

namespace {

constexpr double kLog2 = 0.6931471805599453094;

// Shared factorial table for the convenience entry points, grown on demand.
const LogFactorialTable& table_for(int n) {
  thread_local std::unique_ptr<LogFactorialTable> table;
  if (!table || table->n_max() < n)
    table = std::make_unique<LogFactorialTable>(std::max(n, 256));
  return *table;
}

bool parity_ok(int n, long long k) {
  return ((k - n) % 2) == 0;
}

}  // namespace

double entropy_i(double x) {
  if (!(std::fabs(x) <= 1.0)) throw std::domain_error("entropy_i: |x| > 1");
  const double ax = std::fabs(x);
  if (ax == 1.0) return kLog2;
  return 0.5 * ((1.0 + x) * std::log1p(x) + (1.0 - x) * std::log1p(-x));
}

double taylor_coeff(int i) {
  if (i < 2) throw std::invalid_argument("taylor_coeff: need i >= 2");
  if (i % 2 == 1) return 0.0;
  return 1.0 / (static_cast<double>(i) * (i - 1));
}

double log_count_single(int n, long long k) {
  if (k < -n || k > n || !parity_ok(n, k)) return kNegInf;
  const auto& lf = table_for(n);
  const long long up = (n + k) / 2;
  return lf(n) - lf(up) - lf(n - up);
}

double lambda_boundary(int n, long long k) {
  const double np1 = static_cast<double>(n) + 1.0;
  const double kk = static_cast<double>(k);
  return 0.5 * std::log((np1 * np1 - kk * kk) / (static_cast<double>(n) * n));
}

double log_count_triple(const LogFactorialTable& lf, int n, long long k,
                        long long l, long long m) {
  if (k < -n || k > n || l < -n || l > n || m < -n || m > n) return kNegInf;
  if (!parity_ok(n, k) || !parity_ok(n, l) || !parity_ok(n, m)) return kNegInf;
  // Counts of sites by the sign pair (sigma_i, tau_i); all four must be
  // nonnegative integers summing to n.
  const long long s = n + k + l + m;
  if (s % 4 != 0) return kNegInf;
  const long long q_pp = s / 4;
  const long long q_pm = (n + k - l - m) / 4;
  const long long q_mp = (n - k + l - m) / 4;
  const long long q_mm = (n - k - l + m) / 4;
  if (q_pp < 0 || q_pm < 0 || q_mp < 0 || q_mm < 0) return kNegInf;
  return lf(n) - lf(q_pp) - lf(q_pm) - lf(q_mp) - lf(q_mm);
}

TripleCount count_triple(int n, long long k, long long l, long long m) {
  return TripleCount{n, k, l, m, log_count_triple(table_for(n), n, k, l, m)};
}

unsigned long long count_triple_exact(int n, long long k, long long l, long long m) {
  if (n > 20)
    throw std::invalid_argument("count_triple_exact: n > 20 overflows 64-bit counts");
  if (log_count_triple(table_for(n), n, k, l, m) == kNegInf) return 0;
  const long long q[4] = {(n + k + l + m) / 4, (n + k - l - m) / 4,
                          (n - k + l - m) / 4, (n - k - l + m) / 4};
  // Multinomial as a product of binomials, each computed exactly.
  const auto binom = [](long long nn, long long rr) {
    unsigned long long acc = 1;
    rr = std::min(rr, nn - rr);
    for (long long i = 1; i <= rr; ++i) {
      acc = acc * static_cast<unsigned long long>(nn - rr + i) /
            static_cast<unsigned long long>(i);
    }
    return acc;
  };
  unsigned long long count = 1;
  long long left = n;
  for (int idx = 0; idx < 3; ++idx) {
    count *= binom(left, q[idx]);
    left -= q[idx];
  }
  return count;
}

double stirling_gap(int n, long long k_window) {
  if (n < 1) throw std::invalid_argument("stirling_gap: n must be positive");
  if (k_window > n)
    throw std::invalid_argument("stirling_gap: window exceeds n");
  const auto& lf = table_for(n);
  const double base = (n + 1.0) * kLog2 -
                      0.5 * std::log(2.0 * M_PI * static_cast<double>(n));
  double worst = 0.0;
  // Both sides are even in k, so scanning k >= 0 covers the window.
  for (long long k = n % 2; k <= k_window; k += 2) {
    const long long up = (n + k) / 2;
    const double exact = lf(n) - lf(up) - lf(n - up);
    const double ref = base - n * entropy_i(static_cast<double>(k) / n) -
                       lambda_boundary(n, k);
    worst = std::max(worst, std::fabs(exact - ref));
  }
  return worst;
}

}  // namespace dcw
