#include "hetemb/randgraph.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <mutex>
#include <algorithm>
#include <exception>

#include "hetemb/barycenter.hpp"
#include "hetemb/clique.hpp"
#include "hetemb/reconstruct.hpp"
#include "hetemb/rotsym.hpp"

namespace hetemb {

void SampleConfig::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(tangent_radius >= 0.0)) throw std::invalid_argument("tangent_radius must be nonnegative");
  if (!(radial_lo >= 0.0 && radial_lo < radial_hi)) {
    throw std::invalid_argument("radial interval must satisfy 0 <= lo < hi");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (runs == 0) throw std::invalid_argument("runs must be positive");
}

Embedding sample_points(const SampleConfig& cfg, bool heterogeneous) {
  cfg.validate();
  FactorSpec h{FactorKind::Hyperbolic, 3};
  std::vector<FactorSpec> factors{h};
  if (heterogeneous) {
    FactorSpec r{FactorKind::RotSym, 3};
    r.alpha = cfg.alpha;
    factors.push_back(r);
  }
  Embedding emb(ManifoldSpec(factors), cfg.n);
  const ManifoldSpec& spec = emb.spec();
  const Point base = base_point(spec);

  // Radii come from their own stream so the H^3 positions match the
  // homogeneous sample of the same seed.
  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 radial_rng(cfg.seed ^ 0x5851f42d4c957f2dull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> radial(cfg.radial_lo, cfg.radial_hi);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    double dir[3];
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& x : dir) {
        x = gauss(rng);
        norm += x * x;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    // Uniform in the 3-ball: radius ~ R u^(1/3).
    const double len = cfg.tangent_radius * std::cbrt(unit(rng));
    Point v(spec.stride(), 0.0);
    for (int k = 0; k < 3; ++k) v[static_cast<std::size_t>(k)] = len * dir[k] / norm;
    auto p = emb.point(i);
    std::copy(base.begin(), base.end(), p.begin());
    exp_map_inplace(spec, p, v);
    if (heterogeneous) p[*spec.radial_coord()] = radial(radial_rng);
  }
  return emb;
}

Graph generate_homogeneous(const SampleConfig& cfg) {
  return nn_graph(sample_points(cfg, false), cfg.rho);
}

Graph heterogeneous_graph(const Embedding& points, double alpha, double ell, double rho) {
  const std::size_t n = points.size();
  std::vector<char> curved(n);
  for (std::size_t i = 0; i < n; ++i) curved[i] = rotsym::curvature(alpha, *points.radial(i)) > ell;
  const FactorSpec& h = points.spec().factor(0);
  const std::size_t m = h.coord_size();
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool base = factor_distance(h, points.point(i).subspan(0, m), points.point(j).subspan(0, m)) <= 1.0;
      const bool linked = curved[i] && curved[j] &&
                          distance(points.spec(), points.point(i), points.point(j)) <= rho;
      if (base || linked) g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  }
  return g;
}

Graph generate_heterogeneous(const SampleConfig& cfg) {
  if (!cfg.ell) throw std::invalid_argument("heterogeneous generator needs ell");
  return heterogeneous_graph(sample_points(cfg, true), cfg.alpha, *cfg.ell, cfg.rho);
}

std::vector<double> clustering_coefficients(const Graph& g) {
  const TriangleCounts tc = triangle_counts(g);
  std::vector<double> c(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const double d = static_cast<double>(g.degree(static_cast<NodeId>(i)));
    if (d >= 2.0) c[i] = static_cast<double>(tc.per_node[i]) / (d * (d - 1.0) / 2.0);
  }
  return c;
}

namespace {

std::pair<double, double> mean_var(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, s / static_cast<double>(v.size())};
}

MeanStd across(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = mean_var(v).first;
  if (v.size() > 1) {
    double s = 0.0;
    for (double x : v) s += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(s / static_cast<double>(v.size() - 1));
  }
  return out;
}

}  // namespace

GraphStats graph_stats(const Graph& g, std::chrono::milliseconds clique_budget) {
  GraphStats s;
  std::vector<double> deg(g.num_nodes());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) deg[i] = static_cast<double>(g.degree(static_cast<NodeId>(i)));
  std::tie(s.degree_mean, s.degree_var) = mean_var(deg);
  std::tie(s.clustering_mean, s.clustering_var) = mean_var(clustering_coefficients(g));
  const CliqueResult c = max_clique(g, clique_budget);
  s.max_clique_size = c.members.size();
  s.clique_exact = c.exact;
  return s;
}

RunSet generate_runs(const SampleConfig& cfg, SampleMode mode) {
  cfg.validate();
  if (mode == SampleMode::Heterogeneous && !cfg.ell) {
    throw std::invalid_argument("heterogeneous generator needs ell");
  }
  RunSet out;
  out.graphs.resize(cfg.runs);
  out.stats.resize(cfg.runs);
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.runs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cfg.runs;) {
      try {
        SampleConfig run = cfg;
        run.seed = cfg.seed + k;
        out.graphs[k] = mode == SampleMode::Homogeneous ? generate_homogeneous(run)
                                                        : generate_heterogeneous(run);
        out.stats[k] = graph_stats(out.graphs[k], cfg.clique_budget);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> dm, ds, cm, cs, mc;
  std::vector<std::vector<double>> hists;
  for (std::size_t k = 0; k < cfg.runs; ++k) {
    const GraphStats& s = out.stats[k];
    dm.push_back(s.degree_mean);
    ds.push_back(std::sqrt(s.degree_var));
    cm.push_back(s.clustering_mean);
    cs.push_back(std::sqrt(s.clustering_var));
    mc.push_back(static_cast<double>(s.max_clique_size));
    hists.push_back(degree_histogram(out.graphs[k]));
  }
  out.degree_mean = across(dm);
  out.degree_std = across(ds);
  out.clustering_mean = across(cm);
  out.clustering_std = across(cs);
  out.max_clique = across(mc);
  out.degree_barycenter = degree_barycenter(hists);
  return out;
}

}  // namespace hetemb
