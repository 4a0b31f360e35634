#pragma once

#include <string>
#include <vector>

#include "dcw/core_model.hpp"

namespace dcw {

/// One of the limiting laws for the scaled magnetization: a centered
/// Gaussian, the pure quartic law with density proportional to
/// exp(-x^4/12), or the interpolating family with density proportional to
/// exp(-c x^2/24 - x^4/12). Construction normalizes by quadrature (and
/// verifies the normalization to 1e-8); non-Gaussian CDFs are tabulated once
/// on a 10^5-point grid over [-30, 30] with monotone linear interpolation,
/// a tabulation error below 1e-7 that distance tolerances account for.
class LimitLaw {
 public:
  enum class Family { gauss, quartic, quartic_gauss };

  static LimitLaw gauss(double variance);
  static LimitLaw quartic();
  static LimitLaw quartic_gauss(double c);

  Family family() const { return family_; }
  double param() const { return param_; }
  std::string name() const;

  double pdf(double x) const;
  double cdf(double x) const;
  /// Central moment of the law; order must be <= 8. Odd orders are 0 by
  /// symmetry and returned without quadrature.
  double moment(int order) const;
  double log_normalization() const { return log_norm_; }

 private:
  LimitLaw(Family f, double param);
  double log_pdf_unnormalized(double x) const;

  Family family_;
  double param_;
  double log_norm_;
  std::vector<double> cdf_table_;  // empty for the Gaussian (closed form)
};

/// Law and scaling predicted for a (beta, regime) pair. crit_line carries
/// the finite constant c with p^4 N^3 -> 1/c^2.
struct PredictedLimit {
  LimitLaw law;
  ScalingRule scale;
};
PredictedLimit predicted_limit(double beta, Regime regime, double c = 0.0);

/// The finite-N reading of the critical-line constant: c = (p^4 N^3)^(-1/2).
double critical_line_c(const ModelParams& params);

/// Discrete law with strictly increasing atoms and normalized weights.
class EmpiricalLaw {
 public:
  EmpiricalLaw(std::vector<double> atoms, std::vector<double> weights);
  static EmpiricalLaw from_log_weights(std::vector<double> atoms,
                                       std::vector<double> log_weights);

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double cdf(double t) const;
  double cdf_left(double t) const;
  double moment(int order) const;
  EmpiricalLaw symmetrized() const;
  /// Atoms divided by the given positive scale.
  EmpiricalLaw rescaled(double scale) const;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<double> cum_;
};

enum class Metric { levy, ks, tv };

double distance(Metric metric, const EmpiricalLaw& a, const EmpiricalLaw& b);
double distance(Metric metric, const EmpiricalLaw& a, const LimitLaw& b);
double distance(Metric metric, const LimitLaw& a, const EmpiricalLaw& b);
double distance(Metric metric, const LimitLaw& a, const LimitLaw& b);

}  // namespace dcw
