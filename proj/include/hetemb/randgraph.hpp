#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "hetemb/embedding.hpp"
#include "hetemb/graph.hpp"

namespace hetemb {

struct SampleConfig {
  std::size_t n = 500;
  double tangent_radius = 2.75;
  double radial_lo = 0.0;
  double radial_hi = 2.0;
  double alpha = 1.0;
  double rho = 1.0;
  std::optional<double> ell;  // required by the heterogeneous generator
  std::size_t runs = 20;
  std::uint64_t seed = 0;
  std::chrono::milliseconds clique_budget{10000};
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// n points drawn uniformly from a tangent ball at the hyperboloid apex of H^3
/// and pushed through the exponential map. With heterogeneous = true the
/// points live on h3,rot(a=alpha) and radii are uniform on the radial interval.
Embedding sample_points(const SampleConfig& cfg, bool heterogeneous);

/// Threshold graph of an H^3 sample at cfg.rho.
Graph generate_homogeneous(const SampleConfig& cfg);

/// Edge (i,j) iff the H^3 distance is at most 1, or both R_alpha(r_i),
/// R_alpha(r_j) exceed ell and the product distance on H^3 x R is at most rho.
/// With ell above 12/alpha^2 this is the homogeneous graph at rho = 1 of the
/// same seed.
Graph generate_heterogeneous(const SampleConfig& cfg);
Graph heterogeneous_graph(const Embedding& points, double alpha, double ell, double rho);

struct GraphStats {
  double degree_mean = 0.0;
  double degree_var = 0.0;
  double clustering_mean = 0.0;
  double clustering_var = 0.0;
  std::size_t max_clique_size = 0;
  bool clique_exact = true;
};

/// Local clustering coefficient per node; 0 when the degree is below 2.
std::vector<double> clustering_coefficients(const Graph& g);

GraphStats graph_stats(const Graph& g,
                       std::chrono::milliseconds clique_budget = std::chrono::seconds(10));

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across runs
};

struct RunSet {
  std::vector<Graph> graphs;
  std::vector<GraphStats> stats;
  MeanStd degree_mean, degree_std, clustering_mean, clustering_std, max_clique;
  std::vector<double> degree_barycenter;
};

enum class SampleMode { Homogeneous, Heterogeneous };

/// cfg.runs independent graphs; run k uses seed cfg.seed + k. Runs execute in
/// parallel and the result does not depend on the thread count.
RunSet generate_runs(const SampleConfig& cfg, SampleMode mode);

}  // namespace hetemb
