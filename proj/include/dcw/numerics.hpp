#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace dcw {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(cosh(z)), overflow-safe for large |z|.
inline double log_cosh(double z) {
  const double a = std::fabs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453094;
}

/// Streaming log-sum-exp accumulator. Results depend only on the insertion
/// order, which callers keep fixed, so sums are reproducible.
class LogSumAcc {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = (max_ == kNegInf) ? 1.0 : sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  bool empty() const { return max_ == kNegInf; }
  double value() const {
    if (empty()) return kNegInf;
    return max_ + std::log(sum_);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

inline double log_sum_exp(std::span<const double> log_terms) {
  LogSumAcc acc;
  for (double t : log_terms) acc.add(t);
  return acc.value();
}

/// Kahan compensated summation.
class KahanAcc {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// Table of log(n!) for n = 0..n_max.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int n_max) : table_(static_cast<size_t>(n_max) + 1) {
    if (n_max < 0) throw std::invalid_argument("LogFactorialTable: n_max < 0");
    for (int n = 0; n <= n_max; ++n) table_[n] = std::lgamma(n + 1.0);
  }
  double operator()(long long n) const {
    if (n < 0 || n >= static_cast<long long>(table_.size()))
      throw std::out_of_range("LogFactorialTable: index out of range");
    return table_[static_cast<size_t>(n)];
  }
  int n_max() const { return static_cast<int>(table_.size()) - 1; }

 private:
  std::vector<double> table_;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need two equal-length samples of size >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

/// Median of a copy of v (v need not be sorted). Throws on empty input.
double median(std::vector<double> v);

/// Lower and upper quartiles by linear interpolation of order statistics.
struct Quartiles {
  double q1, median, q3;
};
Quartiles quartiles(std::vector<double> v);

/// Adaptive Gauss-Kronrod integration of f over [a, b], absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

}  // namespace dcw
