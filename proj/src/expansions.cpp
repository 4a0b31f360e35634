#include "dcw/expansions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dcw/combinatorics.hpp"
#include "dcw/numerics.hpp"

namespace dcw {

double eval_f(int m, double x, double p, double z) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("eval_f: p outside [0, 1]");
  const double w = x * z - m * log_cosh(z);
  const double u = p * std::expm1(w);
  if (u <= -1.0) throw std::domain_error("eval_f: nonpositive log argument");
  return std::log1p(u);
}

SingleCoeffs coeffs_single(double p, double gamma) {
  const double fp = eval_f(1, 1.0, p, gamma);
  const double fm = eval_f(1, 1.0, p, -gamma);
  return SingleCoeffs{0.5 * (fp + fm), 0.5 * (fp - fm)};
}

PairCoeffs coeffs_pair(double p, double gamma) {
  const double g2 = eval_f(2, 2.0, p, gamma);
  const double g0 = eval_f(2, 0.0, p, gamma);
  const double gm = eval_f(2, -2.0, p, gamma);
  PairCoeffs c;
  c.b0 = 0.25 * (g2 + gm + 2.0 * g0);
  c.b1 = 0.25 * (g2 - gm);
  c.b2 = c.b1;
  c.b12 = 0.25 * (g2 + gm - 2.0 * g0);
  return c;
}

double log_expected_t(const ModelParams& params, long long m_sigma) {
  const long long n = params.n;
  if (m_sigma < -n || m_sigma > n || ((m_sigma - n) % 2) != 0)
    throw std::invalid_argument(
        "log_expected_t: M out of range or parity-inconsistent with N");
  const SingleCoeffs c = coeffs_single(params.p, params.gamma());
  return static_cast<double>(n) * n * c.a0 +
         c.a1 * static_cast<double>(m_sigma) * static_cast<double>(m_sigma);
}

double log_expected_tt(const ModelParams& params, long long m_sigma,
                       long long m_tau, long long m_overlap) {
  if (count_triple(params.n, m_sigma, m_tau, m_overlap).log_count == kNegInf)
    throw std::invalid_argument(
        "log_expected_tt: (M_sigma, M_tau, M_overlap) not realizable");
  const PairCoeffs c = coeffs_pair(params.p, params.gamma());
  const double n2 = static_cast<double>(params.n) * params.n;
  const auto sq = [](long long v) {
    return static_cast<double>(v) * static_cast<double>(v);
  };
  return n2 * c.b0 + c.b1 * (sq(m_sigma) + sq(m_tau)) + c.b12 * sq(m_overlap);
}

const char* identity_name(ExpansionIdentity id) {
  switch (id) {
    case ExpansionIdentity::single_log_const:
      return "single_log_const";
    case ExpansionIdentity::single_tilt:
      return "single_tilt";
    case ExpansionIdentity::pair_tilt:
      return "pair_tilt";
    case ExpansionIdentity::pair_overlap:
      return "pair_overlap";
    case ExpansionIdentity::pair_log_const:
      return "pair_log_const";
  }
  return "?";
}

double asserted_z_order(ExpansionIdentity id) {
  switch (id) {
    case ExpansionIdentity::single_log_const:
      return 4.0;
    case ExpansionIdentity::single_tilt:
      return 3.0;
    case ExpansionIdentity::pair_tilt:
      return 3.0;
    case ExpansionIdentity::pair_overlap:
      return 3.0;
    case ExpansionIdentity::pair_log_const:
      return 4.0;
  }
  return 0.0;
}

// Each residual collapses to a composition of log1p and atanh whose leading
// cancellation is done symbolically, so the only rounding left is the final
// few operations; long double keeps that floor near 1e-21.
double residual_value(ExpansionIdentity id, double p, double z) {
  const long double lp = p;
  const long double lz = z;
  const long double t = std::tanh(lz);
  const long double pt = lp * t;
  const long double pt2 = lp * t * t;
  long double r = 0.0L;
  switch (id) {
    case ExpansionIdentity::single_log_const:
      r = std::log1p(-pt * pt) + pt * pt;
      break;
    case ExpansionIdentity::single_tilt:
      r = 2.0L * std::atanh(pt) - 2.0L * pt;
      break;
    case ExpansionIdentity::pair_tilt:
      r = 2.0L * std::atanh(2.0L * pt / (1.0L + pt2)) - 4.0L * pt;
      break;
    case ExpansionIdentity::pair_overlap: {
      const long double u = 2.0L * pt2 - 4.0L * pt * pt + pt2 * pt2;
      r = std::log1p(u) - 2.0L * std::log1p(-pt2) - 4.0L * lp * (1.0L - lp) * t * t;
      break;
    }
    case ExpansionIdentity::pair_log_const: {
      const long double u = 2.0L * pt2 - 4.0L * pt * pt + pt2 * pt2;
      r = std::log1p(u) + 2.0L * std::log1p(-pt2) + 4.0L * lp * lp * lz * lz;
      break;
    }
  }
  return static_cast<double>(r);
}

FittedOrders residual_order(ExpansionIdentity id) {
  std::vector<double> z_grid, p_grid;
  for (int j = 4; j <= 16; ++j) z_grid.push_back(std::ldexp(1.0, -j));
  for (int i = 1; i <= 8; ++i) p_grid.push_back(std::ldexp(1.0, -i));
  return residual_order(id, p_grid, z_grid);
}

FittedOrders residual_order(ExpansionIdentity id, std::span<const double> p_grid,
                            std::span<const double> z_grid) {
  if (p_grid.size() < 4 || z_grid.size() < 7)
    throw std::invalid_argument("residual_order: grids too small to fit");
  const size_t z_lo = 2, z_hi = z_grid.size() - 5;
  const size_t p_lo = p_grid.size() / 2, p_hi = p_grid.size() - 1;
  const double p_fix = p_grid[std::min<size_t>(3, p_grid.size() - 1)];
  const double z_fix = z_grid[std::min<size_t>(4, z_grid.size() - 1)];

  double max_abs = 0.0;
  std::vector<double> xs, ys;
  for (size_t j = z_lo; j <= z_hi; ++j) {
    const double r = std::fabs(residual_value(id, p_fix, z_grid[j]));
    max_abs = std::max(max_abs, r);
    xs.push_back(std::log(z_grid[j]));
    ys.push_back(std::log(r));
  }
  const double z_order = fit_line(xs, ys).slope;

  xs.clear();
  ys.clear();
  for (size_t i = p_lo; i <= p_hi; ++i) {
    const double r = std::fabs(residual_value(id, p_grid[i], z_fix));
    max_abs = std::max(max_abs, r);
    xs.push_back(std::log(p_grid[i]));
    ys.push_back(std::log(r));
  }
  const double p_order = fit_line(xs, ys).slope;

  FittedOrders out{z_order, p_order, false};
  if (max_abs < 1e-14) {
    out.exact_within_noise = true;
    out.z_order = 0.0;
    out.p_order = 0.0;
  }
  return out;
}

}  // namespace dcw
