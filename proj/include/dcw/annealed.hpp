#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dcw/core_model.hpp"

namespace dcw {

/// Bounded continuous nonnegative test function from a fixed registry. All
/// registry members are even; the second-moment kernel folds sign symmetries
/// on that basis.
struct TestFunction {
  std::string id;
  std::function<double(double)> eval;
  double bound;  // 0 <= eval(x) <= bound everywhere
};

/// Registry entries: "one" (constant 1), "gauss" (exp(-x^2)),
/// "cauchy" (1/(1+x^2)), "bump" (exp(-1/(1-x^2)) on |x| < 1, else 0).
const std::vector<TestFunction>& test_function_registry();

/// Registry lookup by id; throws std::invalid_argument for an unknown id.
const TestFunction& test_function(std::string_view id);

/// log of the disorder-averaged tilted sum E Z(beta, g), computed exactly as
/// an O(N) sum over magnetization classes,
///   sum_k nu_N(k) g(k / scale) exp(N^2 a0 + a1 k^2),
/// accumulated in log domain. Never sees a sampled graph.
double annealed_mean(const ModelParams& params, const TestFunction& g,
                     ScalingRule scale);

/// Closed-form limit prediction for the annealed mean in the given regime,
/// log domain. The g-integrals are evaluated by quadrature on [-30, 30].
/// Throws std::invalid_argument when the regime is inconsistent with the
/// parameters (high_temp needs beta < 1, the critical regimes beta == 1)
/// or when beta > 1 (no low-temperature support).
double mean_prediction(const ModelParams& params, const TestFunction& g,
                       Regime regime);

/// log E Z^2 via the exact triple sum over pair magnetization classes
/// (k, l, m) weighted by exp(N^2 b0 + b1 (k^2 + l^2) + b12 m^2). O(N^3)
/// terms, so N > n_guard is refused with a cost estimate in the error
/// message. The m loop visits only parity-admissible overlaps, and the
/// (k,l) swap and joint sign-flip orbits shrink the lattice about fourfold.
///
/// Work is split over k-slices on `threads` threads. Each slice accumulates
/// in a fixed order and the slice values are combined by a pairwise tree
/// reduction over the fixed k order, so the result is bit-identical for any
/// thread count.
double annealed_second_moment(const ModelParams& params, const TestFunction& g,
                              ScalingRule scale, int n_guard = 400,
                              int threads = 1);

/// (E Z^2 - (E Z)^2) / (E Z)^2, formed as expm1(log E Z^2 - 2 log E Z) so
/// that near-cancellation costs no precision. Values below -1e-9 signal an
/// internal inconsistency and throw std::runtime_error; smaller negative
/// rounding residue is clamped to zero.
double variance_ratio(const ModelParams& params, const TestFunction& g,
                      ScalingRule scale, int n_guard = 400, int threads = 1);

/// Same ratio from already-computed log moments.
double variance_ratio_from_logs(double log_mean, double log_second);

}  // namespace dcw
