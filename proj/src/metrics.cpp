#include "hetemb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetemb/rotsym.hpp"

namespace hetemb {

DistortionResult avg_distance_distortion(const Embedding& emb, const DistanceMatrix& d) {
  if (d.size() != emb.size()) throw ShapeError("distortion: node count mismatch");
  DistortionResult out;
  double total = 0.0;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    for (std::size_t j = i + 1; j < emb.size(); ++j) {
      if (!d.reachable(i, j)) continue;
      const double dm = distance(emb.spec(), emb.point(i), emb.point(j));
      total += std::abs(1.0 - dm / static_cast<double>(d(i, j)));
      ++out.pairs_used;
    }
  }
  out.value = out.pairs_used ? total / static_cast<double>(out.pairs_used) : 0.0;
  return out;
}

MapResult mean_average_precision(const Embedding& emb, const Graph& g) {
  const std::size_t n = emb.size();
  if (g.num_nodes() != n) throw ShapeError("mAP: node count mismatch");
  MapResult out;
  std::vector<double> all, nbr;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& neighbors = g.neighbors(static_cast<NodeId>(i));
    if (neighbors.empty()) {
      ++out.isolated_skipped;
      continue;
    }
    all.clear();
    for (std::size_t z = 0; z < n; ++z)
      if (z != i) all.push_back(distance(emb.spec(), emb.point(i), emb.point(z)));
    std::sort(all.begin(), all.end());
    nbr.clear();
    for (NodeId j : neighbors)
      nbr.push_back(distance(emb.spec(), emb.point(i), emb.point(static_cast<std::size_t>(j))));
    std::sort(nbr.begin(), nbr.end());
    double ap = 0.0;
    for (double dij : nbr) {
      const auto ranked = std::upper_bound(all.begin(), all.end(), dij) - all.begin();
      const auto hits = std::upper_bound(nbr.begin(), nbr.end(), dij) - nbr.begin();
      ap += static_cast<double>(hits) / static_cast<double>(ranked);
    }
    total += ap / static_cast<double>(nbr.size());
    ++out.nodes_used;
  }
  out.value = out.nodes_used ? total / static_cast<double>(out.nodes_used) : 0.0;
  return out;
}

std::optional<double> avg_curvature_distortion(const Embedding& emb,
                                               const std::vector<double>& forman_values) {
  if (!emb.spec().has_rotsym() || !emb.shift) return std::nullopt;
  if (forman_values.size() != emb.size()) throw ShapeError("AD_c: node count mismatch");
  if (emb.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const double f = forman_values[i];
    total += std::abs(f - reconstructed_curvature(emb, i)) / (std::abs(f) + 1.0);
  }
  return total / static_cast<double>(emb.size());
}

std::vector<double> degree_normalized_forman(const Graph& g, const FormanSignal& f) {
  std::vector<double> out(g.num_nodes(), 0.0);
  for (std::size_t k = 0; k < f.edges.size(); ++k) {
    const Edge& e = f.edges[k];
    const double scale = static_cast<double>(std::max(g.degree(e.u), g.degree(e.v)));
    out[static_cast<std::size_t>(e.u)] += f.edge_values[k] / scale;
    out[static_cast<std::size_t>(e.v)] += f.edge_values[k] / scale;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto deg = g.degree(static_cast<NodeId>(i));
    if (deg) out[i] /= static_cast<double>(deg);
  }
  return out;
}

double forman_variance(const FormanSignal& f) {
  const auto& v = f.node_values;
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

double avg_triangle_distortion(const std::vector<double>& true_counts,
                               const std::vector<double>& estimates) {
  if (true_counts.size() != estimates.size()) {
    throw ShapeError("triangle distortion: vectors differ in length");
  }
  if (true_counts.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < true_counts.size(); ++i) {
    total += std::abs(true_counts[i] - estimates[i]) / (true_counts[i] + 1.0);
  }
  return total / static_cast<double>(true_counts.size());
}

VolumeMatch volume_match(const Embedding& emb, const DistanceMatrix& d, double rho) {
  const auto& factors = emb.spec().factors();
  const bool shape_ok = factors.size() == 2 && factors[0].kind == FactorKind::Hyperbolic &&
                        factors[0].dim == 3 && factors[1].kind == FactorKind::RotSym;
  if (!shape_ok) throw ContractViolation("volume_match needs an h3,rot embedding");
  if (d.size() != emb.size()) throw ShapeError("volume_match: node count mismatch");
  if (!(rho > 0.0)) throw std::domain_error("volume_match: rho must be positive");

  const double alpha = factors[1].alpha;
  VolumeMatch out;
  out.graph_ball.resize(emb.size());
  out.manifold_volume.resize(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < emb.size(); ++j)
      if (d.reachable(i, j) && static_cast<double>(d(i, j)) <= rho) ++count;
    out.graph_ball[i] = static_cast<double>(count);
    out.manifold_volume[i] = rotsym::annular_volume(alpha, 3, *emb.radial(i), rho);
  }
  auto normalize = [](std::vector<double>& v) {
    const double m = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    if (m > 0.0)
      for (double& x : v) x /= m;
  };
  normalize(out.graph_ball);
  normalize(out.manifold_volume);
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t m = k;
    while (m + 1 < idx.size() && v[idx[m + 1]] == v[idx[k]]) ++m;
    const double r = 0.5 * static_cast<double>(k + m) + 1.0;
    for (std::size_t t = k; t <= m; ++t) ranks[idx[t]] = r;
    k = m + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ShapeError("spearman: need equal sizes >= 2");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

EvalReport evaluate(const Embedding& emb, const Graph& g, const EvalOptions& opts) {
  if (g.num_nodes() != emb.size()) throw ShapeError("evaluate: node count mismatch");
  EvalReport rep;
  const DistanceMatrix d = bfs_apsp(g);
  DistortionResult ad = avg_distance_distortion(emb, d);
  rep.ad_d = ad.value;
  rep.n_pairs_used = ad.pairs_used;
  const std::size_t all_pairs = emb.size() * (emb.size() - (emb.size() ? 1 : 0)) / 2;
  if (ad.pairs_used < all_pairs) {
    rep.notes.push_back("disconnected pairs excluded: " + std::to_string(all_pairs - ad.pairs_used));
  }
  MapResult m = mean_average_precision(emb, g);
  rep.map = m.value;
  if (m.isolated_skipped) {
    rep.notes.push_back("isolated nodes skipped in mAP: " + std::to_string(m.isolated_skipped));
  }
  const double gamma = emb.shift ? emb.shift->gamma : opts.gamma;
  const FormanSignal f = forman(g, gamma);
  rep.forman_variance = forman_variance(f);
  const std::vector<double> values = opts.normalized_forman ? degree_normalized_forman(g, f) : f.node_values;
  rep.ad_c = avg_curvature_distortion(emb, values);
  if (rep.ad_c) {
    rep.notes.push_back(std::string("AD_c uses the training shift R_alpha(r) + min F - delta_hat") +
                        (opts.normalized_forman ? " against degree-normalized Forman" : ""));
  }
  return rep;
}

}  // namespace hetemb
