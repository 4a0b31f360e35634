#include "dcw/numerics.hpp"

#include <algorithm>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dcw {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

static double order_stat(const std::vector<double>& sorted, double q) {
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

Quartiles quartiles(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("quartiles: empty input");
  std::sort(v.begin(), v.end());
  return Quartiles{order_stat(v, 0.25), order_stat(v, 0.5), order_stat(v, 0.75)};
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  const double result =
      gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol, &error);
  return result;
}

}  // namespace dcw
