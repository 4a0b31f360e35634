#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "dcw/limits_stats.hpp"
#include "dcw/rng.hpp"

using namespace dcw;

TEST_CASE("limit laws are normalized with the right even moments") {
  const LimitLaw g2 = LimitLaw::gauss(2.0);
  CHECK(g2.moment(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g2.moment(2) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(g2.moment(4) == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(g2.moment(6) == doctest::Approx(120.0).epsilon(1e-7));
  CHECK(g2.moment(3) == 0.0);
  CHECK(g2.moment(5) == 0.0);
  CHECK_THROWS_AS(g2.moment(9), std::invalid_argument);
  CHECK_THROWS_AS(g2.moment(-1), std::invalid_argument);

  const LimitLaw quartic = LimitLaw::quartic();
  CHECK(quartic.moment(0) == doctest::Approx(1.0).epsilon(1e-10));
  // E x^2 = sqrt(12) Gamma(3/4) / Gamma(1/4); E x^4 = 12 Gamma(5/4)/Gamma(1/4) = 3.
  const double m2_want = std::sqrt(12.0) * std::tgamma(0.75) / std::tgamma(0.25);
  CHECK(quartic.moment(2) == doctest::Approx(m2_want).epsilon(1e-9));
  CHECK(quartic.moment(4) == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("gaussian-quartic interpolation reaches both endpoints") {
  const LimitLaw quartic = LimitLaw::quartic();
  const LimitLaw nearly_quartic = LimitLaw::quartic_gauss(1e-6);
  double sup = 0.0;
  for (int i = -600; i <= 600; ++i) {
    const double x = 0.01 * i;
    sup = std::max(sup, std::fabs(nearly_quartic.pdf(x) - quartic.pdf(x)));
  }
  CHECK(sup <= 1e-5);
  // Large c: the x^4 term is negligible and the law approaches gauss(12/c),
  // with relative second-moment correction about (12/c)^2.
  const LimitLaw nearly_gauss = LimitLaw::quartic_gauss(1000.0);
  CHECK(nearly_gauss.moment(2) * 1000.0 / 12.0 ==
        doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("limit law cdf is a proper distribution function") {
  const LimitLaw quartic = LimitLaw::quartic();
  CHECK(quartic.cdf(-30.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(quartic.cdf(30.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quartic.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-10));
  double prev = -1.0;
  for (int i = -60; i <= 60; ++i) {
    const double c = quartic.cdf(0.5 * i);
    CHECK(c >= prev);
    prev = c;
  }
  const LimitLaw g1 = LimitLaw::gauss(1.0);
  for (double x : {-1.5, -0.3, 0.0, 0.7, 2.2})
    CHECK(g1.cdf(x) == doctest::Approx(oracles::gauss_cdf(x)).epsilon(1e-12));
}

TEST_CASE("predicted limits map regimes to laws and scalings") {
  const PredictedLimit ht = predicted_limit(0.5, Regime::high_temp);
  CHECK(ht.scale == ScalingRule::sqrt_n);
  CHECK(ht.law.moment(2) == doctest::Approx(2.0).epsilon(1e-9));

  const PredictedLimit ht0 = predicted_limit(0.0, Regime::high_temp);
  CHECK(ht0.law.moment(2) == doctest::Approx(1.0).epsilon(1e-9));

  const PredictedLimit cd = predicted_limit(1.0, Regime::crit_diverging);
  CHECK(cd.scale == ScalingRule::n34);
  CHECK(cd.law.name() == LimitLaw::quartic().name());

  const PredictedLimit cl = predicted_limit(1.0, Regime::crit_line, 2.0);
  CHECK(cl.scale == ScalingRule::n34);

  const PredictedLimit cv = predicted_limit(1.0, Regime::crit_vanishing);
  CHECK(cv.scale == ScalingRule::n32p);
  CHECK(cv.law.moment(2) == doctest::Approx(12.0).epsilon(1e-8));

  CHECK_THROWS_AS(predicted_limit(1.0, Regime::high_temp),
                  std::invalid_argument);
  CHECK_THROWS_AS(predicted_limit(0.9, Regime::crit_diverging),
                  std::invalid_argument);
  CHECK_THROWS_AS(predicted_limit(1.0, Regime::crit_line, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(predicted_limit(1.2, Regime::high_temp),
                  std::invalid_argument);
}

TEST_CASE("critical line constant from finite-size parameters") {
  // c = (p^4 N^3)^(-1/2)
  const ModelParams params(100, 0.1, 1.0);
  CHECK(critical_line_c(params) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("empirical law construction sorts, merges and normalizes") {
  const EmpiricalLaw law({1.0, -1.0, 1.0}, {0.25, 0.5, 0.25});
  REQUIRE(law.atoms().size() == 2);
  CHECK(law.atoms()[0] == -1.0);
  CHECK(law.atoms()[1] == 1.0);
  CHECK(law.weights()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(law.weights()[1] == doctest::Approx(0.5).epsilon(1e-15));

  const EmpiricalLaw dropped({0.0, 1.0}, {0.0, 3.0});
  REQUIRE(dropped.atoms().size() == 1);
  CHECK(dropped.atoms()[0] == 1.0);
  CHECK(dropped.weights()[0] == 1.0);

  CHECK_THROWS_AS(EmpiricalLaw({0.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalLaw({0.0}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalLaw({0.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("empirical law cdf left limits and moments") {
  const EmpiricalLaw law({-1.0, 0.0, 2.0}, {1.0, 2.0, 1.0});
  CHECK(law.cdf(-2.0) == 0.0);
  CHECK(law.cdf(-1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(law.cdf_left(-1.0) == 0.0);
  CHECK(law.cdf(0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(law.cdf_left(2.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(law.cdf(2.0) == 1.0);
  CHECK(law.moment(1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(law.moment(2) == doctest::Approx(0.25 + 4.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("symmetrization and rescaling") {
  const EmpiricalLaw law({-1.0, 0.0, 2.0}, {1.0, 2.0, 1.0});
  const EmpiricalLaw sym = law.symmetrized();
  REQUIRE(sym.atoms().size() == 5);
  CHECK(sym.moment(1) == doctest::Approx(0.0).epsilon(1e-15));
  for (size_t i = 0; i < sym.atoms().size(); ++i) {
    CHECK(sym.atoms()[i] ==
          -sym.atoms()[sym.atoms().size() - 1 - i]);
    CHECK(sym.weights()[i] ==
          doctest::Approx(sym.weights()[sym.atoms().size() - 1 - i])
              .epsilon(1e-15));
  }
  const EmpiricalLaw scaled = law.rescaled(2.0);
  CHECK(scaled.atoms()[0] == -0.5);
  CHECK(scaled.atoms()[2] == 1.0);
  CHECK(scaled.weights() == law.weights());
}

TEST_CASE("log-weight construction tolerates minus infinity entries") {
  const EmpiricalLaw law = EmpiricalLaw::from_log_weights(
      {-1.0, 0.0, 1.0}, {kNegInf, 0.0, kNegInf});
  REQUIRE(law.atoms().size() == 1);
  CHECK(law.atoms()[0] == 0.0);
  CHECK_THROWS_AS(
      EmpiricalLaw::from_log_weights({0.0, 1.0}, {kNegInf, kNegInf}),
      std::invalid_argument);
}

TEST_CASE("metric hand values") {
  const EmpiricalLaw zero({0.0}, {1.0});
  const EmpiricalLaw half({0.0, 1.0}, {0.5, 0.5});
  const EmpiricalLaw shifted({0.0, 2.0}, {0.5, 0.5});
  CHECK(distance(Metric::tv, half, shifted) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(distance(Metric::tv, half, half) == 0.0);
  CHECK(distance(Metric::ks, half, shifted) ==
        doctest::Approx(0.5).epsilon(1e-12));

  const LimitLaw g1 = LimitLaw::gauss(1.0);
  CHECK(distance(Metric::ks, zero, g1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(distance(Metric::levy, zero, g1) ==
        doctest::Approx(oracles::levy_delta0_vs_gauss()).epsilon(1e-7));
  CHECK_THROWS_AS(distance(Metric::tv, zero, g1), std::invalid_argument);
}

TEST_CASE("levy distance to a shifted point mass is min(a, 1)") {
  const EmpiricalLaw zero({0.0}, {1.0});
  for (double a : {1e-4, 0.01, 0.3, 0.99, 1.0, 1.7}) {
    const EmpiricalLaw pt({a}, {1.0});
    CHECK(std::fabs(distance(Metric::levy, zero, pt) - std::min(a, 1.0)) <=
          1e-9);
  }
}

TEST_CASE("levy metric properties on randomized discrete laws") {
  Rng rng(555);
  const auto random_law = [&rng]() {
    const int count = 3 + static_cast<int>(uniform_below(rng, 12));
    std::vector<double> atoms, weights;
    for (int i = 0; i < count; ++i) {
      atoms.push_back(4.0 * uniform01(rng) - 2.0);
      weights.push_back(0.05 + uniform01(rng));
    }
    return EmpiricalLaw(std::move(atoms), std::move(weights));
  };
  for (int rep = 0; rep < 25; ++rep) {
    const EmpiricalLaw a = random_law();
    const EmpiricalLaw b = random_law();
    const EmpiricalLaw c = random_law();
    const double dab = distance(Metric::levy, a, b);
    CHECK(dab >= 0.0);
    CHECK(dab <= 1.0);
    CHECK(distance(Metric::levy, a, a) == 0.0);
    CHECK(std::fabs(dab - distance(Metric::levy, b, a)) <= 1e-10);
    // The solver returns an upper bound resolved to 5e-11.
    CHECK(dab <= distance(Metric::ks, a, b) + 1e-10);
    CHECK(distance(Metric::levy, a, c) <=
          dab + distance(Metric::levy, b, c) + 1e-8);
  }
}
