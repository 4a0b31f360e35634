#pragma once

#include "dcw/numerics.hpp"

namespace dcw {

/// Binary entropy-type rate function
/// I(x) = ((1-x)/2) log(1-x) + ((1+x)/2) log(1+x) on [-1, 1],
/// with the endpoint limits I(+-1) = log 2.
double entropy_i(double x);

/// Taylor coefficient d_i of I at 0: I(x) = sum_{i>=2} d_i x^i with
/// d_i = 1/(i(i-1)) for even i and 0 for odd i.
double taylor_coeff(int i);

/// log nu_N(k): log of the number of spin configurations with magnetization
/// k, i.e. log binom(N, (N+k)/2); -inf when parity or range forbids k.
double log_count_single(int n, long long k);

/// Boundary factor lambda_N(k) = (1/2) log(((N+1)^2 - k^2) / N^2) appearing
/// in the sharp binomial asymptotics.
double lambda_boundary(int n, long long k);

/// nu_N(k, l, m): number of pairs (sigma, tau) with magnetizations k, l and
/// overlap m. Zero cases (parity, range, unrealizable splits) carry
/// log_count = -inf rather than erroring, so summation kernels can scan
/// rectangular boxes.
struct TripleCount {
  int n;
  long long k, l, m;
  double log_count;
};
TripleCount count_triple(int n, long long k, long long l, long long m);

/// Same count through a caller-provided factorial table (table must cover n);
/// this is the form the O(N^3) summation kernels call in their inner loop.
double log_count_triple(const LogFactorialTable& lf, int n, long long k,
                        long long l, long long m);

/// Exact integer nu_N(k,l,m) for n <= 20 (fits in 64 bits); the brute-force
/// comparison path.
unsigned long long count_triple_exact(int n, long long k, long long l, long long m);

/// Max over admissible |k| <= k_window of the absolute gap between
/// log binom(N, (N+k)/2) and the sharp local-CLT reference
/// (N+1) log 2 - (1/2) log(2 pi N) - N I(k/N) - lambda_N(k).
/// The reference keeps the parity factor 2 (the lattice of achievable k has
/// spacing 2) and the boundary factor lambda_N, without which the gap would
/// not vanish over windows as wide as k ~ N^0.8.
double stirling_gap(int n, long long k_window);

}  // namespace dcw
