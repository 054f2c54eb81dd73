#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetemb/embedding.hpp"
#include "hetemb/graph.hpp"

namespace hetemb {

struct EvalReport {
  double ad_d = 0.0;
  double map = 0.0;
  std::optional<double> ad_c;
  double forman_variance = 0.0;
  std::optional<double> ad_triangle;
  std::size_t n_pairs_used = 0;
  std::vector<std::string> notes;
};

struct DistortionResult {
  double value = 0.0;
  std::size_t pairs_used = 0;
};

/// Mean over connected unordered pairs of |1 - d_M / d_G|.
DistortionResult avg_distance_distortion(const Embedding& emb, const DistanceMatrix& d);

struct MapResult {
  double value = 0.0;
  std::size_t nodes_used = 0;
  std::size_t isolated_skipped = 0;
};

/// Mean average precision of neighbor retrieval; R_{i,j} includes ties (<=).
MapResult mean_average_precision(const Embedding& emb, const Graph& g);

/// (1/n) sum |F_i - R_i| / (|F_i| + 1) with R_i the reconstructed curvature.
/// Absent for embeddings without a rotsym factor or shift constants.
std::optional<double> avg_curvature_distortion(const Embedding& emb,
                                               const std::vector<double>& forman_values);

/// Forman values normalized per edge by the larger endpoint degree, then
/// averaged per node like the unnormalized signal.
std::vector<double> degree_normalized_forman(const Graph& g, const FormanSignal& f);

/// Population variance of the node values.
double forman_variance(const FormanSignal& f);

/// (1/n) sum |t_i - e_i| / (t_i + 1).
double avg_triangle_distortion(const std::vector<double>& true_counts,
                               const std::vector<double>& estimates);

struct VolumeMatch {
  std::vector<double> graph_ball;     // max-normalized |{j : d_G(i,j) <= rho}|
  std::vector<double> manifold_volume;  // max-normalized annular volume at r_i
};

/// Requires the embedding to live on h3 x rot.
VolumeMatch volume_match(const Embedding& emb, const DistanceMatrix& d, double rho);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct EvalOptions {
  bool normalized_forman = false;
  double gamma = 1.0;
};

/// AD_d, mAP and AD_c (or the Forman variance for homogeneous embeddings).
EvalReport evaluate(const Embedding& emb, const Graph& g, const EvalOptions& opts = {});

}  // namespace hetemb
