#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hetemb/metrics.hpp"
#include "hetemb/reconstruct.hpp"
#include "hetemb/rotsym.hpp"
#include "hetemb/train.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hetemb;

namespace {

Embedding line(std::vector<double> xs) {
  Embedding e(ManifoldSpec::parse("e1"), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) e.point(i)[0] = xs[i];
  return e;
}

Embedding random_embedding(const ManifoldSpec& spec, std::size_t n, std::mt19937_64& rng) {
  Embedding e(spec, n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p = testutil::random_point(spec, 1.5, rng);
    std::copy(p.begin(), p.end(), e.point(i).begin());
  }
  return e;
}

// Disagreements on pairs touching the validation set, counted directly.
std::size_t validation_mismatch(const Embedding& e, const Graph& truth, const std::vector<NodeId>& val,
                                double rho) {
  std::vector<char> in_val(e.size(), 0);
  for (NodeId v : val) in_val[static_cast<std::size_t>(v)] = 1;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      if (!in_val[i] && !in_val[j]) continue;
      const bool predicted = distance(e.spec(), e.point(i), e.point(j)) <= rho;
      bad += predicted != truth.has_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  return bad;
}

// rot(a=0.5) embedding whose reconstructed curvature equals `values`
// (targets must stay within (3.25, 48)).
Embedding curvature_embedding(const std::vector<double>& values) {
  Embedding e(ManifoldSpec::parse("rot(a=0.5)"), values.size());
  ShiftConstants s;
  s.min_forman = *std::min_element(values.begin(), values.end());
  s.delta_hat = 4.0;
  e.shift = s;
  for (std::size_t i = 0; i < values.size(); ++i)
    e.point(i)[0] = rotsym::inverse_curvature(0.5, values[i] - s.min_forman + s.delta_hat);
  return e;
}

}  // namespace

TEST_CASE("nearest-neighbor graph examples") {
  const Embedding e = line({0, 1, 2, 3, 4});
  CHECK(nn_graph(e, 1.0) == path_graph(5));
  CHECK(nn_graph(e, 0.5).num_edges() == 0);
  CHECK(nn_graph(e, 10.0) == complete_graph(5));
  CHECK_THROWS_AS(nn_graph(e, 0.0), std::domain_error);
  // Coincident points become neighbors, but never self-loops.
  const Graph dup = nn_graph(line({0, 0, 5}), 0.1);
  CHECK(dup.num_edges() == 1);
  CHECK_FALSE(dup.has_edge(0, 0));
}

TEST_CASE("nearest-neighbor graphs are nested in rho") {
  std::mt19937_64 rng(31);
  const Embedding e = random_embedding(ManifoldSpec::parse("h2,s1"), 25, rng);
  Graph prev = nn_graph(e, 0.05);
  for (double rho = 0.1; rho < 4.0; rho += 0.1) {
    const Graph g = nn_graph(e, rho);
    for (const Edge& ed : prev.edges()) CHECK(g.has_edge(ed.u, ed.v));
    prev = g;
  }
}

TEST_CASE("edge mismatch") {
  CHECK(edge_mismatch(path_graph(4), path_graph(4)) == 0);
  CHECK(edge_mismatch(path_graph(4), cycle_graph(4)) == 1);
  CHECK(edge_mismatch(Graph(4), complete_graph(4)) == 6);
  CHECK_THROWS_AS(edge_mismatch(Graph(3), Graph(4)), ShapeError);
}

TEST_CASE("threshold tuning on a separable cloud") {
  const Embedding e = line({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const ThresholdChoice t = tune_threshold(e, path_graph(10), 0.3, 7);
  CHECK(t.validation_mismatch == 0);
  CHECK(t.validation_nodes.size() == 3);
  CHECK(t.rho == doctest::Approx(1.5));
  CHECK(nn_graph(e, t.rho) == path_graph(10));
}

TEST_CASE("threshold tuning matches a dense grid search") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph truth = oracle::random_connected_graph(12, 0.25, rng);
    const Embedding e = random_embedding(ManifoldSpec::parse(trial % 2 ? "h2" : "e2"), 12, rng);
    const ThresholdChoice t = tune_threshold(e, truth, 0.25, static_cast<std::uint64_t>(trial));
    double diameter = 0.0;
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) diameter = std::max(diameter, distance(e.spec(), e.point(i), e.point(j)));
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (int k = 0; k <= 20000; ++k)
      best = std::min(best, validation_mismatch(e, truth, t.validation_nodes, 1.05 * diameter * k / 20000.0 + 1e-12));
    // Every pairwise distance as a threshold covers intervals narrower than the grid step.
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = i + 1; j < 12; ++j)
        best = std::min(best, validation_mismatch(e, truth, t.validation_nodes, distance(e.spec(), e.point(i), e.point(j))));
    CHECK(t.validation_mismatch == best);
    CHECK(validation_mismatch(e, truth, t.validation_nodes, t.rho) == best);
  }
}

TEST_CASE("threshold tuning is deterministic and scale-equivariant") {
  std::mt19937_64 rng(33);
  const Graph truth = oracle::random_connected_graph(30, 0.15, rng);
  const Embedding e = random_embedding(ManifoldSpec::parse("e3"), 30, rng);
  const ThresholdChoice a = tune_threshold(e, truth, 0.1, 5);
  const ThresholdChoice b = tune_threshold(e, truth, 0.1, 5);
  CHECK(a.rho == b.rho);
  CHECK(a.validation_nodes == b.validation_nodes);
  CHECK(a.validation_nodes.size() == 3);
  Embedding s = e;
  for (double& x : s.coords()) x *= 4.0;
  const ThresholdChoice c = tune_threshold(s, truth, 0.1, 5);
  CHECK(c.rho == doctest::Approx(4.0 * a.rho));
  CHECK(c.validation_mismatch == a.validation_mismatch);
  CHECK_THROWS_AS(tune_threshold(e, truth, 0.0, 5), std::domain_error);
  CHECK_THROWS_AS(tune_threshold(e, truth, 1.0, 5), std::domain_error);
  CHECK_THROWS_AS(tune_threshold(e, truth, 0.01, 5), std::domain_error);
}

TEST_CASE("triangle estimates from curvature") {
  // K3 with curvature 12 at gamma 4: 24 T = 2 * 12 - 0.
  CHECK(estimate_triangles_from(complete_graph(3), {12, 12, 12}, 4.0) == std::vector<double>{1, 1, 1});
  // Triangle-free graphs with their exact Forman values give zero.
  for (const Graph& g : {cycle_graph(6), star_graph(4), cycle_tree_graph(5, 2)}) {
    const FormanSignal f = forman(g, 4.0);
    for (double t : estimate_triangles_from(g, f.node_values, 4.0)) CHECK(t == doctest::Approx(0.0).scale(1.0));
  }
  CHECK_THROWS_AS(estimate_triangles_from(path_graph(3), {1, 2}, 4.0), ShapeError);
  CHECK_THROWS_AS(estimate_triangles_from(path_graph(3), {1, 2, 3}, 0.0), std::domain_error);
}

TEST_CASE("exact curvature inverts to exact triangle counts") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = oracle::random_connected_graph(20, 0.3, rng);
    const auto truth = oracle::node_triangles(g);
    for (double gamma : {1.0, 4.0}) {
      const FormanSignal f = forman(g, gamma);
      const auto est = estimate_triangles_from(g, f.node_values, gamma);
      for (std::size_t i = 0; i < 20; ++i)
        CHECK(est[i] == doctest::Approx(static_cast<double>(truth[i])).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("triangle estimates from an embedding") {
  const Graph g = Graph::from_edges(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}});
  const FormanSignal f = forman(g, 4.0);
  Embedding e = curvature_embedding(f.node_values);
  const TriangleEstimate t = estimate_triangles(e, g, 4.0);
  const auto truth = oracle::node_triangles(g);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t.raw[i] == doctest::Approx(static_cast<double>(truth[i])).scale(1.0).epsilon(1e-9));
    CHECK(t.nn_only[i] == static_cast<double>(truth[i]));
    CHECK(t.clamped[i] >= 0.0);
  }
  // A curvature deficit pushes the raw estimate below zero; the clamped copy stops at 0.
  e.point(4)[0] = 30.0;
  const TriangleEstimate low = estimate_triangles(e, g, 4.0);
  CHECK(low.raw[4] < 0.0);
  CHECK(low.clamped[4] == 0.0);
}

TEST_CASE("curvature correction leaves a consistent graph alone") {
  const Graph g = cycle_tree_graph(6, 2);
  const Embedding e = curvature_embedding(forman(g, 1.0).node_values);
  const ReconstructionResult r = curvature_correction(e, g, 90.0, 1.0, 0.5, 1.0);
  CHECK(r.graph == g);
  for (const CorrectionEntry& c : r.correction_log) CHECK_FALSE(c.accepted);
  CHECK(r.total_error_before < 1e-9);
  CHECK(r.total_error_after == r.total_error_before);
  CHECK_THROWS_AS(curvature_correction(e, g, 0.0, 1.0, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(curvature_correction(e, g, 100.0, 1.0, 0.5, 1.0), std::domain_error);
}

TEST_CASE("curvature correction only accepts improvements") {
  std::mt19937_64 rng(35);
  TrainConfig cfg;
  cfg.epochs = 150;
  for (int trial = 0; trial < 4; ++trial) {
    const Graph truth = oracle::random_connected_graph(24, 0.15, rng);
    cfg.seed = static_cast<std::uint64_t>(trial);
    const TrainResult tr = train(truth, ManifoldSpec::parse("h2,rot(a=auto)"), cfg);
    const ThresholdChoice t = tune_threshold(tr.embedding, truth, 0.25, 1);
    const Graph rec = nn_graph(tr.embedding, t.rho);
    const ReconstructionResult r = curvature_correction(tr.embedding, rec, 50.0, t.rho, 0.3 * t.rho, cfg.gamma);
    CHECK(r.total_error_after <= r.total_error_before);
    const auto errs = curvature_errors(tr.embedding, r.graph, cfg.gamma);
    CHECK(std::accumulate(errs.begin(), errs.end(), 0.0) == doctest::Approx(r.total_error_after));
    const auto start = curvature_errors(tr.embedding, rec, cfg.gamma);
    double prev = std::numeric_limits<double>::infinity();
    for (const CorrectionEntry& c : r.correction_log) {
      if (c.accepted) CHECK(c.err_after < c.err_before);
      CHECK((c.action == "densify" || c.action == "sparsify"));
      // Visited in descending order of the starting error.
      CHECK(start[static_cast<std::size_t>(c.node)] <= prev);
      prev = start[static_cast<std::size_t>(c.node)];
    }
    CHECK_FALSE(r.graph.has_edge(0, 0));
  }
}
