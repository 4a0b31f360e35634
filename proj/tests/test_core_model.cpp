#include <cstdint>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"

#include "dcw/core_model.hpp"

using namespace dcw;

TEST_CASE("model parameter validation accumulates all violations") {
  CHECK_THROWS_AS(ModelParams(0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(10, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(10, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(10, 0.5, -0.1), std::invalid_argument);
  try {
    ModelParams bad(0, 2.0, -1.0);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("n") != std::string::npos);
    CHECK(msg.find("p") != std::string::npos);
    CHECK(msg.find("beta") != std::string::npos);
  }
  const ModelParams params(10, 0.5, 0.8);
  CHECK(params.gamma() == 0.8 / (2.0 * 10 * 0.5));
}

TEST_CASE("scaling values and names") {
  CHECK(scale_value(ScalingRule::sqrt_n, 100, 0.3) == doctest::Approx(10.0));
  CHECK(scale_value(ScalingRule::n34, 16, 0.3) == doctest::Approx(8.0));
  // sqrt(N^3 p^2) = N^(3/2) p
  CHECK(scale_value(ScalingRule::n32p, 100, 0.1) == doctest::Approx(100.0));
  CHECK(scaling_name(ScalingRule::sqrt_n) == "sqrtN");
  CHECK(regime_from_name(regime_name(Regime::crit_line)) == Regime::crit_line);
  CHECK(regime_from_name(regime_name(Regime::high_temp)) == Regime::high_temp);
  CHECK_THROWS_AS(regime_from_name("tropical"), std::invalid_argument);
}

TEST_CASE("spin configuration bookkeeping") {
  SpinConfig s = SpinConfig::from_bits(5, 0b10110);
  CHECK(s.n() == 5);
  CHECK(s.spin(0) == -1);
  CHECK(s.spin(1) == +1);
  CHECK(s.spin(4) == +1);
  CHECK(s.magnetization() == 1);  // 3 up, 2 down
  s.flip(0);
  CHECK(s.magnetization() == 3);
  s.set(1, -1);
  CHECK(s.magnetization() == 1);
  const SpinConfig t = SpinConfig::from_bits(5, 0b00110);
  // overlap = sum s_i t_i
  long long direct = 0;
  for (int i = 0; i < 5; ++i) direct += s.spin(i) * t.spin(i);
  CHECK(overlap(s, t) == direct);
}

TEST_CASE("complete graph at p=1 has all ordered pairs including loops") {
  const ModelParams params(7, 1.0, 0.5);
  const DisorderGraph graph(params, 3);
  CHECK(graph.edge_count() == 49);
  int visited = 0;
  graph.for_each_edge([&](int, int) { ++visited; });
  CHECK(visited == 49);
  CHECK(graph.has_edge(0, 0));
  CHECK(graph.has_edge(6, 2));
  const SpinConfig ones(7, +1);
  CHECK(graph.interaction_sum(ones) == 49);
  // At p=1 the interaction sum is exactly M^2 (loops included).
  const SpinConfig s = SpinConfig::from_bits(7, 0b1010011);
  const long long m = s.magnetization();
  CHECK(graph.interaction_sum(s) == m * m);
}

TEST_CASE("dense and sparse representations produce identical graphs") {
  const ModelParams params(40, 0.1, 0.5);
  const DisorderGraph dense(params, 77, DisorderGraph::Rep::dense);
  const DisorderGraph sparse(params, 77, DisorderGraph::Rep::sparse);
  CHECK(dense.dense());
  CHECK(!sparse.dense());
  CHECK(dense.edge_count() == sparse.edge_count());
  std::ostringstream a, b;
  dense.write_edges(a);
  sparse.write_edges(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("graph sampling is seed determined") {
  const ModelParams params(40, 0.3, 0.5);
  std::ostringstream a, b, c;
  DisorderGraph(params, 5).write_edges(a);
  DisorderGraph(params, 5).write_edges(b);
  DisorderGraph(params, 6).write_edges(c);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
}

TEST_CASE("edge density matches p statistically") {
  const ModelParams params(200, 0.3, 0.5);
  const DisorderGraph graph(params, 11);
  const double density = static_cast<double>(graph.edge_count()) / 40000.0;
  // 5 sigma band, sigma = sqrt(p(1-p))/N
  CHECK(std::fabs(density - 0.3) <= 5.0 * std::sqrt(0.3 * 0.7) / 200.0);
}

TEST_CASE("interaction sum matches a manual edge loop") {
  const ModelParams params(6, 0.6, 0.9);
  const DisorderGraph graph(params, 21);
  const SpinConfig s = SpinConfig::from_bits(6, 0b110010);
  long long manual = 0;
  graph.for_each_edge(
      [&](int i, int j) { manual += s.spin(i) * s.spin(j); });
  CHECK(graph.interaction_sum(s) == manual);
  CHECK(hamiltonian(graph, s, params) ==
        doctest::Approx(-static_cast<double>(manual) / (2.0 * 6 * 0.6))
            .epsilon(1e-15));
  const double want_t = params.gamma() * static_cast<double>(manual) -
                        std::log(std::cosh(params.gamma())) *
                            static_cast<double>(graph.edge_count());
  CHECK(log_t_statistic(graph, s, params) ==
        doctest::Approx(want_t).epsilon(1e-13));
}

TEST_CASE("symmetrized adjacency carries eps_ij + eps_ji off the diagonal") {
  const ModelParams params(6, 0.7, 0.5);
  const DisorderGraph graph(params, 9);
  const SymAdjacency adj = SymAdjacency::build(graph);
  long long loops = 0;
  for (int i = 0; i < 6; ++i)
    if (graph.has_edge(i, i)) ++loops;
  long long weight_total = 0;
  for (int i = 0; i < 6; ++i) {
    std::set<int> seen;
    for (const SymAdjacency::Entry& e : adj.row(i)) {
      CHECK(e.j != i);
      CHECK(!seen.count(e.j));
      seen.insert(e.j);
      const int expected = (graph.has_edge(i, e.j) ? 1 : 0) +
                           (graph.has_edge(e.j, i) ? 1 : 0);
      CHECK(e.w == expected);
      CHECK(expected >= 1);
      weight_total += e.w;
    }
    for (int j = 0; j < 6; ++j) {
      if (j == i || seen.count(j)) continue;
      CHECK(!graph.has_edge(i, j));
      CHECK(!graph.has_edge(j, i));
    }
  }
  CHECK(weight_total ==
        2 * (static_cast<long long>(graph.edge_count()) - loops));
}
