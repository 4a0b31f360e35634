#pragma once

#include <span>
#include <vector>

#include "dcw/core_model.hpp"

namespace dcw {

/// F_m(x, p, z) = log(1 - p + p * exp(x z - m log cosh z)), evaluated through
/// log1p/expm1 so small exponents keep full relative accuracy.
double eval_f(int m, double x, double p, double z);

/// Linearization of f(x) = F_1(x, p, gamma) on x in {-1, +1}:
/// f(x) = a0 + a1 x, so E T(sigma) = exp(N^2 a0 + a1 M^2).
struct SingleCoeffs {
  double a0;
  double a1;
};
SingleCoeffs coeffs_single(double p, double gamma);

/// Linearization of g(s + t) = b0 + b1 s + b2 t + b12 s t for s, t in {-1,+1}
/// with g(x) = F_2(x, p, gamma); b1 == b2 by construction.
struct PairCoeffs {
  double b0;
  double b1;
  double b2;
  double b12;
};
PairCoeffs coeffs_pair(double p, double gamma);

/// log E_disorder T(sigma) = N^2 a0 + a1 M^2. Exact identity, no asymptotics.
double log_expected_t(const ModelParams& params, long long m_sigma);

/// log E_disorder [T(sigma) T(tau)] = N^2 b0 + b1 (M_sigma^2 + M_tau^2)
/// + b12 M_overlap^2. The triple must be realizable by some spin pair.
double log_expected_tt(const ModelParams& params, long long m_sigma,
                       long long m_tau, long long m_overlap);

/// The five series identities whose residual decay orders are fitted
/// numerically. Each names the combination on the left and the leading term
/// subtracted from it.
enum class ExpansionIdentity {
  single_log_const,  // 2 a0 + p^2 tanh^2(z)
  single_tilt,       // 2 a1 - 2 p tanh(z)
  pair_tilt,         // 4 b1 - 4 p tanh(z)
  pair_overlap,      // 4 b12 - 4 p (1-p) tanh^2(z)
  pair_log_const,    // 4 b0 + 4 p^2 z^2
};

inline constexpr ExpansionIdentity kAllIdentities[] = {
    ExpansionIdentity::single_log_const, ExpansionIdentity::single_tilt,
    ExpansionIdentity::pair_tilt, ExpansionIdentity::pair_overlap,
    ExpansionIdentity::pair_log_const};

const char* identity_name(ExpansionIdentity id);

/// z-order asserted for each identity by the source expansion statements;
/// the gate for the order-fitting checks.
double asserted_z_order(ExpansionIdentity id);

/// Residual value in cancellation-free closed form (computed in long double;
/// direct evaluation of lhs minus leading term would lose ~8 digits).
double residual_value(ExpansionIdentity id, double p, double z);

struct FittedOrders {
  double z_order;
  double p_order;
  bool exact_within_noise;  // every fitted residual below 1e-14
};

/// Log-log least-squares slopes of |residual| against z (p fixed at a
/// mid-grid value) and against p (z fixed likewise). Fit windows take the
/// interior of each grid: for z, drop the 2 largest and 4 smallest points;
/// for p, use the smaller half. Defaults: z = 2^-4..2^-16, p = 2^-1..2^-8.
FittedOrders residual_order(ExpansionIdentity id);
FittedOrders residual_order(ExpansionIdentity id, std::span<const double> p_grid,
                            std::span<const double> z_grid);

}  // namespace dcw
