#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "dcw/combinatorics.hpp"
#include "dcw/numerics.hpp"

using namespace dcw;

TEST_CASE("entropy endpoints, symmetry and domain") {
  CHECK(entropy_i(0.0) == 0.0);
  CHECK(entropy_i(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(entropy_i(-1.0) == entropy_i(1.0));
  for (double x : {0.05, 0.3, 0.77}) CHECK(entropy_i(x) == entropy_i(-x));
  CHECK_THROWS_AS(entropy_i(1.0000001), std::domain_error);
  CHECK_THROWS_AS(entropy_i(-2.0), std::domain_error);
}

TEST_CASE("taylor coefficients of the entropy") {
  CHECK(taylor_coeff(2) == 0.5);
  CHECK(taylor_coeff(3) == 0.0);
  CHECK(taylor_coeff(4) == 1.0 / 12.0);
  CHECK(taylor_coeff(6) == 1.0 / 30.0);
  CHECK_THROWS_AS(taylor_coeff(1), std::invalid_argument);
  for (double x : {0.05, 0.1, 0.2}) {
    double series = 0.0;
    for (int i = 2; i <= 16; ++i) series += taylor_coeff(i) * std::pow(x, i);
    // Tail of the series is below 2 x^18 on this range.
    CHECK(std::fabs(entropy_i(x) - series) <= 2.0 * std::pow(x, 18) + 1e-16);
  }
}

TEST_CASE("single magnetization counts match binomials") {
  for (int n : {1, 2, 7, 16, 20})
    for (long long k = -n; k <= n; ++k) {
      if ((k - n) % 2 != 0) {
        CHECK(log_count_single(n, k) == kNegInf);
        continue;
      }
      const double want = std::log(static_cast<double>(
          oracles::binom(n, static_cast<int>((n + k) / 2))));
      CHECK(log_count_single(n, k) == doctest::Approx(want).epsilon(1e-13));
    }
  CHECK(log_count_single(10, 12) == kNegInf);
  CHECK(log_count_single(10, -12) == kNegInf);
}

TEST_CASE("boundary term lambda has its closed form") {
  // lambda_N(k) = (1/2) log(((N+1)^2 - k^2) / N^2)
  CHECK(lambda_boundary(10, 4) ==
        doctest::Approx(0.5 * std::log(1.05)).epsilon(1e-15));
  CHECK(lambda_boundary(100, 0) ==
        doctest::Approx(std::log(101.0 / 100.0)).epsilon(1e-14));
}

TEST_CASE("triple counts equal brute-force spin-pair enumeration") {
  for (int n = 2; n <= 8; ++n) {
    const auto tally = oracles::brute_triple_tally(n);
    const int dim = n + 1;
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
          CHECK(count_triple_exact(n, k, l, m) == want);
          const double lc = count_triple(n, k, l, m).log_count;
          if (want == 0) {
            CHECK(lc == kNegInf);
          } else {
            CHECK(lc == doctest::Approx(std::log(static_cast<double>(want)))
                            .epsilon(1e-12));
          }
        }
    CHECK(total == (1ull << (2 * n)));
  }
}

TEST_CASE("triple counts are not symmetric under overlap sign flip") {
  // Flipping only the overlap is not induced by any spin relabeling.
  CHECK(count_triple_exact(6, 2, 2, 2) == 120);
  CHECK(count_triple_exact(6, 2, 2, -2) == 90);
}

TEST_CASE("triple count symmetries induced by spin relabelings") {
  const int n = 9;
  for (long long k = -n; k <= n; k += 2)
    for (long long l = -n; l <= n; l += 2)
      for (long long m = -n; m <= n; m += 2) {
        const unsigned long long base = count_triple_exact(n, k, l, m);
        CHECK(count_triple_exact(n, l, k, m) == base);    // swap sigma, tau
        CHECK(count_triple_exact(n, -k, -l, m) == base);  // flip both
        CHECK(count_triple_exact(n, k, -l, -m) == base);  // flip tau
        CHECK(count_triple_exact(n, -k, l, -m) == base);  // flip sigma
      }
}

TEST_CASE("marginalizing the overlap recovers the product of binomials") {
  for (int n : {9, 10})
    for (long long k = -n; k <= n; k += 2)
      for (long long l = -n; l <= n; l += 2) {
        unsigned long long sum = 0;
        for (long long m = -n; m <= n; ++m)
          sum += count_triple_exact(n, k, l, m);
        CHECK(sum == oracles::binom(n, static_cast<int>((n + k) / 2)) *
                         oracles::binom(n, static_cast<int>((n + l) / 2)));
      }
}

TEST_CASE("log-domain marginalization holds at large N") {
  const int n = 10000;
  const LogFactorialTable lf(n);
  LogSumAcc acc;
  for (long long m = -n; m <= n; m += 2)
    acc.add(log_count_triple(lf, n, 100, -50, m));
  const double want = log_count_single(n, 100) + log_count_single(n, -50);
  CHECK(acc.value() == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("inadmissible triples have zero count") {
  const LogFactorialTable lf(12);
  CHECK(log_count_triple(lf, 12, 13, 0, 0) == kNegInf);   // out of range
  CHECK(log_count_triple(lf, 12, 3, 0, 0) == kNegInf);    // parity of k
  CHECK(log_count_triple(lf, 12, 2, 2, 2) == kNegInf);    // 4-divisibility
  CHECK(log_count_triple(lf, 12, 12, 12, -12) == kNegInf);  // negative cell
  CHECK(count_triple_exact(12, 2, 2, 2) == 0);
  CHECK_THROWS_AS(count_triple_exact(21, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("stirling window gap shrinks and is frozen at pilot scale") {
  CHECK_THROWS_AS(stirling_gap(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(stirling_gap(10, 11), std::invalid_argument);
  const double g100 = stirling_gap(100, 39);
  const double g10000 = stirling_gap(10000, 1584);
  CHECK(g100 > 8.4e-3);
  CHECK(g100 < 8.7e-3);
  CHECK(g10000 > 7.0e-5);
  CHECK(g10000 < 8.0e-5);
  CHECK(g10000 < g100);
}
