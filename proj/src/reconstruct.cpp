#include "hetemb/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace hetemb {

Graph nn_graph(const Embedding& emb, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("nn_graph: rho must be positive");
  Graph g(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i)
    for (std::size_t j = i + 1; j < emb.size(); ++j)
      if (distance(emb.spec(), emb.point(i), emb.point(j)) <= rho)
        g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return g;
}

std::size_t edge_mismatch(const Graph& a, const Graph& b) {
  if (a.num_nodes() != b.num_nodes()) throw ShapeError("edge_mismatch: node count mismatch");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.num_nodes(); ++i) {
    const auto& x = a.neighbors(static_cast<NodeId>(i));
    const auto& y = b.neighbors(static_cast<NodeId>(i));
    std::vector<NodeId> sym;
    std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(sym));
    diff += sym.size();
  }
  return diff / 2;
}

ThresholdChoice tune_threshold(const Embedding& emb, const Graph& truth, double val_fraction,
                               std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw std::domain_error("tune_threshold: val_fraction must lie in (0,1)");
  }
  const std::size_t n = emb.size();
  if (truth.num_nodes() != n) throw ShapeError("tune_threshold: node count mismatch");
  const auto k = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n)));
  if (k == 0 || n < 2) throw std::domain_error("tune_threshold: validation set is empty");

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  ThresholdChoice out;
  out.validation_nodes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.validation_nodes.begin(), out.validation_nodes.end());
  std::vector<char> in_val(n, 0);
  for (NodeId v : out.validation_nodes) in_val[static_cast<std::size_t>(v)] = 1;

  struct Candidate {
    double dist;
    bool edge;
  };
  std::vector<Candidate> cand;
  std::size_t true_edges = 0;
  for (NodeId v : out.validation_nodes) {
    const auto i = static_cast<std::size_t>(v);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || (in_val[j] && j < i)) continue;  // each unordered pair once
      const bool edge = truth.has_edge(v, static_cast<NodeId>(j));
      true_edges += edge;
      cand.push_back({distance(emb.spec(), emb.point(i), emb.point(j)), edge});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });

  // Below every candidate all pairs are predicted absent.
  std::size_t mismatch = true_edges;
  std::size_t best = mismatch;
  std::size_t best_end = 0;  // number of candidates predicted present
  for (std::size_t pos = 0; pos < cand.size();) {
    std::size_t end = pos;
    while (end < cand.size() && cand[end].dist == cand[pos].dist) {
      mismatch = cand[end].edge ? mismatch - 1 : mismatch + 1;
      ++end;
    }
    if (mismatch < best) {
      best = mismatch;
      best_end = end;
    }
    pos = end;
  }
  out.validation_mismatch = best;
  if (best_end == 0) {
    out.rho = cand.empty() || cand.front().dist <= 0.0 ? 1e-12 : 0.5 * cand.front().dist;
  } else if (best_end == cand.size()) {
    out.rho = cand.back().dist > 0.0 ? 1.5 * cand.back().dist : 1.0;
  } else {
    out.rho = 0.5 * (cand[best_end - 1].dist + cand[best_end].dist);
  }
  return out;
}

std::vector<double> estimate_triangles_from(const Graph& g, const std::vector<double>& curvature,
                                            double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("estimate_triangles: gamma must be positive");
  if (curvature.size() != g.num_nodes()) throw ShapeError("estimate_triangles: node count mismatch");
  std::vector<double> est(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto& nb = g.neighbors(static_cast<NodeId>(i));
    if (nb.empty()) continue;
    const double di = static_cast<double>(nb.size());
    double sum = 0.0;
    for (NodeId j : nb) sum += 4.0 - di - static_cast<double>(g.degree(j));
    est[i] = (di * curvature[i] - sum) / (6.0 * gamma);
  }
  return est;
}

TriangleEstimate estimate_triangles(const Embedding& emb, const Graph& reconstructed, double gamma) {
  if (reconstructed.num_nodes() != emb.size()) throw ShapeError("estimate_triangles: node count mismatch");
  std::vector<double> curvature(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) curvature[i] = reconstructed_curvature(emb, i);
  TriangleEstimate out;
  out.raw = estimate_triangles_from(reconstructed, curvature, gamma);
  out.clamped = out.raw;
  for (double& x : out.clamped) x = std::max(x, 0.0);
  const TriangleCounts tc = triangle_counts(reconstructed);
  out.nn_only.assign(tc.per_node.begin(), tc.per_node.end());
  return out;
}

std::vector<double> curvature_errors(const Embedding& emb, const Graph& g, double gamma) {
  const FormanSignal f = forman(g, gamma);
  std::vector<double> err(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i)
    err[i] = std::abs(reconstructed_curvature(emb, i) - f.node_values[i]);
  return err;
}

namespace {

double percentile_value(std::vector<double> v, double pct) {
  std::sort(v.begin(), v.end());
  const double pos = pct / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

ReconstructionResult curvature_correction(const Embedding& emb, const Graph& reconstructed,
                                          double percentile, double rho, double step,
                                          double gamma) {
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw std::domain_error("curvature_correction: percentile must lie in (0,100)");
  }
  if (reconstructed.num_nodes() != emb.size()) throw ShapeError("curvature_correction: node count mismatch");
  const std::size_t n = emb.size();
  ReconstructionResult out;
  out.rho = rho;
  out.graph = reconstructed;
  Graph& g = out.graph;

  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = reconstructed_curvature(emb, i);
  std::vector<double> err = curvature_errors(emb, g, gamma);
  out.total_error_before = std::accumulate(err.begin(), err.end(), 0.0);
  if (n == 0) return out;
  const double cut = percentile_value(err, percentile);

  std::vector<NodeId> flagged;
  for (std::size_t i = 0; i < n; ++i)
    if (err[i] > cut) flagged.push_back(static_cast<NodeId>(i));
  std::stable_sort(flagged.begin(), flagged.end(), [&](NodeId a, NodeId b) {
    return err[static_cast<std::size_t>(a)] > err[static_cast<std::size_t>(b)];
  });

  for (NodeId i : flagged) {
    const auto ii = static_cast<std::size_t>(i);
    const double current = forman_node_value(g, i, gamma);
    const bool densify = current < target[ii];
    std::vector<NodeId> toggled;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == ii) continue;
      const double dij = distance(emb.spec(), emb.point(ii), emb.point(j));
      const bool present = g.has_edge(i, static_cast<NodeId>(j));
      if (densify && !present && dij <= rho + step) toggled.push_back(static_cast<NodeId>(j));
      if (!densify && present && dij > rho - step) toggled.push_back(static_cast<NodeId>(j));
    }
    CorrectionEntry entry{i, densify ? "densify" : "sparsify", toggled.size(), 0.0, 0.0, false};
    if (toggled.empty()) {
      out.correction_log.push_back(entry);
      continue;
    }

    // Nodes whose Forman value can change: i, the toggled endpoints and all
    // of their neighbors before and after the change.
    std::set<NodeId> affected{i};
    auto add_closed_neighborhood = [&](NodeId v) {
      affected.insert(v);
      for (NodeId w : g.neighbors(v)) affected.insert(w);
    };
    add_closed_neighborhood(i);
    for (NodeId j : toggled) add_closed_neighborhood(j);

    for (NodeId j : toggled) densify ? g.add_edge(i, j) : g.remove_edge(i, j);
    add_closed_neighborhood(i);
    for (NodeId j : toggled) add_closed_neighborhood(j);

    std::vector<std::pair<NodeId, double>> fresh;
    double after = 0.0;
    for (NodeId v : affected) {
      const auto vi = static_cast<std::size_t>(v);
      const double e = std::abs(target[vi] - forman_node_value(g, v, gamma));
      fresh.emplace_back(v, e);
      after += e;
    }
    double before = 0.0;
    for (NodeId v : affected) before += err[static_cast<std::size_t>(v)];
    entry.err_before = before;
    entry.err_after = after;
    entry.accepted = after < before;
    if (entry.accepted) {
      for (auto [v, e] : fresh) err[static_cast<std::size_t>(v)] = e;
    } else {
      for (NodeId j : toggled) densify ? g.remove_edge(i, j) : g.add_edge(i, j);
    }
    out.correction_log.push_back(entry);
  }
  out.total_error_after = std::accumulate(err.begin(), err.end(), 0.0);
  return out;
}

}  // namespace hetemb
