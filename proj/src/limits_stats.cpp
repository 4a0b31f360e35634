#include "dcw/limits_stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dcw/numerics.hpp"

namespace dcw {

namespace {

constexpr double kDomain = 30.0;   // support truncation for quadrature/tables
constexpr int kTablePoints = 100001;

double table_step() { return 2.0 * kDomain / (kTablePoints - 1); }

}  // namespace

LimitLaw::LimitLaw(Family f, double param) : family_(f), param_(param) {
  if (f == Family::gauss && !(param > 0.0))
    throw std::invalid_argument("LimitLaw: Gaussian variance must be positive");
  if (f == Family::quartic_gauss && !(param > 0.0))
    throw std::invalid_argument("LimitLaw: QuarticGauss c must be positive");

  const auto updf = [this](double x) { return std::exp(log_pdf_unnormalized(x)); };
  const double norm = integrate(updf, -kDomain, kDomain, 1e-12);
  log_norm_ = std::log(norm);

  const double check = integrate([this](double x) { return pdf(x); }, -kDomain,
                                 kDomain, 1e-12);
  if (std::fabs(check - 1.0) >= 1e-8)
    throw std::logic_error("LimitLaw: normalization check failed");

  if (family_ != Family::gauss) {
    // Cumulative table by per-interval Simpson; error O(h^4) per step is far
    // below the budgeted interpolation error.
    cdf_table_.resize(kTablePoints);
    cdf_table_[0] = 0.0;
    const double h = table_step();
    double acc = 0.0;
    for (int i = 1; i < kTablePoints; ++i) {
      const double x0 = -kDomain + (i - 1) * h;
      const double x1 = x0 + h;
      acc += h / 6.0 * (pdf(x0) + 4.0 * pdf(0.5 * (x0 + x1)) + pdf(x1));
      cdf_table_[i] = std::min(acc, 1.0);
    }
  }
}

LimitLaw LimitLaw::gauss(double variance) { return LimitLaw(Family::gauss, variance); }
LimitLaw LimitLaw::quartic() { return LimitLaw(Family::quartic, 0.0); }
LimitLaw LimitLaw::quartic_gauss(double c) { return LimitLaw(Family::quartic_gauss, c); }

std::string LimitLaw::name() const {
  std::ostringstream os;
  switch (family_) {
    case Family::gauss:
      os << "Gauss(" << param_ << ")";
      break;
    case Family::quartic:
      os << "Quartic";
      break;
    case Family::quartic_gauss:
      os << "QuarticGauss(" << param_ << ")";
      break;
  }
  return os.str();
}

double LimitLaw::log_pdf_unnormalized(double x) const {
  const double x2 = x * x;
  switch (family_) {
    case Family::gauss:
      return -x2 / (2.0 * param_);
    case Family::quartic:
      return -x2 * x2 / 12.0;
    case Family::quartic_gauss:
      return -param_ * x2 / 24.0 - x2 * x2 / 12.0;
  }
  return 0.0;
}

double LimitLaw::pdf(double x) const {
  return std::exp(log_pdf_unnormalized(x) - log_norm_);
}

double LimitLaw::cdf(double x) const {
  if (family_ == Family::gauss) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0 * param_));
  }
  if (x <= -kDomain) return 0.0;
  if (x >= kDomain) return 1.0;
  const double h = table_step();
  const double pos = (x + kDomain) / h;
  const auto i = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  const size_t j = std::min(i + 1, cdf_table_.size() - 1);
  return cdf_table_[i] * (1.0 - frac) + cdf_table_[j] * frac;
}

double LimitLaw::moment(int order) const {
  if (order < 0 || order > 8)
    throw std::invalid_argument("LimitLaw::moment: order must be in 0..8");
  if (order == 0) return 1.0;
  if (order % 2 == 1) return 0.0;
  return integrate(
      [this, order](double x) { return std::pow(x, order) * pdf(x); }, -kDomain,
      kDomain, 1e-12);
}

PredictedLimit predicted_limit(double beta, Regime regime, double c) {
  switch (regime) {
    case Regime::high_temp:
      if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument(
            "predicted_limit: high-temp regime requires 0 <= beta < 1");
      return PredictedLimit{LimitLaw::gauss(1.0 / (1.0 - beta)), ScalingRule::sqrt_n};
    case Regime::crit_diverging:
      if (beta != 1.0)
        throw std::invalid_argument("predicted_limit: critical regimes require beta = 1");
      return PredictedLimit{LimitLaw::quartic(), ScalingRule::n34};
    case Regime::crit_line:
      if (beta != 1.0)
        throw std::invalid_argument("predicted_limit: critical regimes require beta = 1");
      if (!(c > 0.0))
        throw std::invalid_argument("predicted_limit: crit-line requires c > 0");
      return PredictedLimit{LimitLaw::quartic_gauss(c), ScalingRule::n34};
    case Regime::crit_vanishing:
      if (beta != 1.0)
        throw std::invalid_argument("predicted_limit: critical regimes require beta = 1");
      return PredictedLimit{LimitLaw::gauss(12.0), ScalingRule::n32p};
  }
  throw std::logic_error("predicted_limit: bad regime");
}

double critical_line_c(const ModelParams& params) {
  return 1.0 / (params.p * params.p * std::pow(static_cast<double>(params.n), 1.5));
}

EmpiricalLaw::EmpiricalLaw(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size() || atoms.empty())
    throw std::invalid_argument("EmpiricalLaw: atom/weight size mismatch or empty");
  std::vector<size_t> order(atoms.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&atoms](size_t a, size_t b) { return atoms[a] < atoms[b]; });
  double total = 0.0;
  for (size_t idx : order) {
    const double x = atoms[idx];
    const double w = weights[idx];
    if (!(w >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("EmpiricalLaw: weights must be nonnegative, atoms finite");
    if (w == 0.0) continue;
    if (!atoms_.empty() && atoms_.back() == x) {
      weights_.back() += w;
    } else {
      atoms_.push_back(x);
      weights_.push_back(w);
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("EmpiricalLaw: total weight is zero");
  cum_.resize(weights_.size());
  double run = 0.0;
  for (size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] /= total;
    run += weights_[i];
    cum_[i] = run;
  }
  cum_.back() = 1.0;
}

EmpiricalLaw EmpiricalLaw::from_log_weights(std::vector<double> atoms,
                                            std::vector<double> log_weights) {
  if (atoms.size() != log_weights.size() || atoms.empty())
    throw std::invalid_argument("EmpiricalLaw: atom/weight size mismatch or empty");
  const double norm = log_sum_exp(log_weights);
  if (norm == kNegInf)
    throw std::invalid_argument("EmpiricalLaw: all log-weights are -inf");
  std::vector<double> w(log_weights.size());
  for (size_t i = 0; i < w.size(); ++i)
    w[i] = (log_weights[i] == kNegInf) ? 0.0 : std::exp(log_weights[i] - norm);
  return EmpiricalLaw(std::move(atoms), std::move(w));
}

double EmpiricalLaw::cdf(double t) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t);
  if (it == atoms_.begin()) return 0.0;
  return cum_[static_cast<size_t>(it - atoms_.begin()) - 1];
}

double EmpiricalLaw::cdf_left(double t) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t);
  if (it == atoms_.begin()) return 0.0;
  return cum_[static_cast<size_t>(it - atoms_.begin()) - 1];
}

double EmpiricalLaw::moment(int order) const {
  if (order < 0) throw std::invalid_argument("EmpiricalLaw::moment: negative order");
  KahanAcc acc;
  for (size_t i = 0; i < atoms_.size(); ++i)
    acc.add(weights_[i] * std::pow(atoms_[i], order));
  return acc.value();
}

EmpiricalLaw EmpiricalLaw::symmetrized() const {
  std::vector<double> xs;
  std::vector<double> ws;
  xs.reserve(2 * atoms_.size());
  ws.reserve(2 * atoms_.size());
  for (size_t i = 0; i < atoms_.size(); ++i) {
    xs.push_back(atoms_[i]);
    ws.push_back(0.5 * weights_[i]);
    xs.push_back(-atoms_[i]);
    ws.push_back(0.5 * weights_[i]);
  }
  return EmpiricalLaw(std::move(xs), std::move(ws));
}

EmpiricalLaw EmpiricalLaw::rescaled(double scale) const {
  if (!(scale > 0.0))
    throw std::invalid_argument("EmpiricalLaw::rescaled: scale must be positive");
  std::vector<double> xs(atoms_.size());
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = atoms_[i] / scale;
  return EmpiricalLaw(std::move(xs), weights_);
}

namespace {

// Uniform adapter over the two law types for the metric routines.
struct LawView {
  const EmpiricalLaw* emp = nullptr;
  const LimitLaw* lim = nullptr;

  double cdf(double t) const { return emp ? emp->cdf(t) : lim->cdf(t); }
  double cdf_left(double t) const { return emp ? emp->cdf_left(t) : lim->cdf(t); }
  const std::vector<double>* jumps() const { return emp ? &emp->atoms() : nullptr; }
};

std::vector<double> continuous_knots() {
  std::vector<double> k;
  k.reserve(2401);
  for (int i = 0; i <= 2400; ++i) k.push_back(-30.0 + i * 0.025);
  return k;
}

// Lemma (jump-point feasibility): for fixed eps >= 0 the Levy sandwich
//   F_a(t - eps) - eps <= F_b(t) <= F_a(t + eps) + eps  for all t
// fails somewhere iff one of the one-sided deficits
//   sup_t [F_a(t - eps) - F_b(t)]   or   sup_t [F_b(t) - F_a(t + eps)]
// exceeds eps. On any open interval free of jumps of both CDFs the deficit
// is a difference of a constant-or-continuous nondecreasing term and a
// nondecreasing term, so it is one-sided monotone there and its supremum
// over the interval is attained at an endpoint in the closure of the jump
// set. Concretely the candidates are t = (jump a of F_a) + eps, where the
// deficit evaluates as F_a(a) - F_b(a + eps), and t -> (jump b of F_b) from
// the left, where it evaluates with left limits as
// F_a(b - eps, left) - F_b(b, left). Checking those finitely many points is
// therefore exact, not an approximation. A continuous law contributes no
// candidates of its own; when both laws are continuous a fixed knot grid
// stands in for the jump set and the result is resolution-limited.
double levy_metric(const LawView& a, const LawView& b) {
  std::vector<double> knots;
  if (!a.jumps() && !b.jumps()) knots = continuous_knots();
  const auto jumps_of = [&knots](const LawView& v) -> const std::vector<double>* {
    return v.jumps() ? v.jumps() : (knots.empty() ? nullptr : &knots);
  };

  const auto feasible = [&](double eps) {
    constexpr double kSlack = 1e-15;
    const auto side = [&](const LawView& f, const LawView& g) {
      if (const auto* jf = jumps_of(f)) {
        for (double t : *jf)
          if (f.cdf(t) - g.cdf(t + eps) > eps + kSlack) return false;
      }
      if (const auto* jg = jumps_of(g)) {
        for (double t : *jg)
          if (f.cdf_left(t - eps) - g.cdf_left(t) > eps + kSlack) return false;
      }
      return true;
    };
    return side(a, b) && side(b, a);
  };

  double lo = 0.0, hi = 1.0;  // eps = 1 is always feasible, so d_L <= 1
  if (feasible(lo)) return 0.0;
  while (hi - lo > 5e-11) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double ks_metric(const LawView& a, const LawView& b) {
  std::vector<double> knots;
  if (!a.jumps() && !b.jumps()) knots = continuous_knots();
  double best = 0.0;
  const auto scan = [&](const std::vector<double>* js) {
    if (!js) return;
    for (double t : *js) {
      best = std::max(best, std::fabs(a.cdf(t) - b.cdf(t)));
      best = std::max(best, std::fabs(a.cdf_left(t) - b.cdf_left(t)));
    }
  };
  scan(a.jumps() ? a.jumps() : (knots.empty() ? nullptr : &knots));
  scan(b.jumps() ? b.jumps() : (knots.empty() ? nullptr : &knots));
  return best;
}

double tv_metric(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  const auto& xa = a.atoms();
  const auto& xb = b.atoms();
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < xa.size() || j < xb.size()) {
    if (j >= xb.size() || (i < xa.size() && xa[i] < xb[j])) {
      sum += a.weights()[i];
      ++i;
    } else if (i >= xa.size() || xb[j] < xa[i]) {
      sum += b.weights()[j];
      ++j;
    } else {
      sum += std::fabs(a.weights()[i] - b.weights()[j]);
      ++i;
      ++j;
    }
  }
  return 0.5 * sum;
}

double dispatch(Metric metric, LawView a, LawView b) {
  switch (metric) {
    case Metric::levy:
      return levy_metric(a, b);
    case Metric::ks:
      return ks_metric(a, b);
    case Metric::tv:
      if (!a.emp || !b.emp)
        throw std::invalid_argument("distance: tv requires two empirical laws");
      return tv_metric(*a.emp, *b.emp);
  }
  throw std::logic_error("distance: bad metric");
}

}  // namespace

double distance(Metric metric, const EmpiricalLaw& a, const EmpiricalLaw& b) {
  return dispatch(metric, LawView{&a, nullptr}, LawView{&b, nullptr});
}
double distance(Metric metric, const EmpiricalLaw& a, const LimitLaw& b) {
  return dispatch(metric, LawView{&a, nullptr}, LawView{nullptr, &b});
}
double distance(Metric metric, const LimitLaw& a, const EmpiricalLaw& b) {
  return dispatch(metric, LawView{nullptr, &a}, LawView{&b, nullptr});
}
double distance(Metric metric, const LimitLaw& a, const LimitLaw& b) {
  return dispatch(metric, LawView{nullptr, &a}, LawView{nullptr, &b});
}

}  // namespace dcw
