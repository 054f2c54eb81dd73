#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetemb/embedding.hpp"
#include "hetemb/graph.hpp"

namespace hetemb {

/// Edge (i, j) iff d_M(y_i, y_j) <= rho, i != j.
Graph nn_graph(const Embedding& emb, double rho);

/// Number of node pairs on which the two graphs disagree.
std::size_t edge_mismatch(const Graph& a, const Graph& b);

struct ThresholdChoice {
  double rho = 0.0;
  std::size_t validation_mismatch = 0;
  std::vector<NodeId> validation_nodes;
};

/// Picks rho minimizing adjacency disagreements on pairs that involve a
/// randomly drawn validation node set (val_fraction of the nodes). Every
/// threshold between two consecutive candidate distances is equivalent; the
/// midpoint is returned and ties go to the smaller rho.
ThresholdChoice tune_threshold(const Embedding& emb, const Graph& truth, double val_fraction,
                               std::uint64_t seed);

struct TriangleEstimate {
  std::vector<double> raw;      // may be negative
  std::vector<double> clamped;  // raw clipped at 0
  std::vector<double> nn_only;  // exact triangle counts of the reconstructed graph
};

/// Inverts the Forman identity 6 gamma T_i = d_i R_i - sum_j A_ij (4 - d_i - d_j)
/// with reconstructed degrees and the manifold curvature R_i of node i.
TriangleEstimate estimate_triangles(const Embedding& emb, const Graph& reconstructed,
                                    double gamma = 4.0);

/// Same identity with caller-supplied curvature values.
std::vector<double> estimate_triangles_from(const Graph& reconstructed,
                                            const std::vector<double>& curvature, double gamma);

struct CorrectionEntry {
  NodeId node;
  std::string action;  // "densify" or "sparsify"
  std::size_t edges_changed;
  double err_before;
  double err_after;
  bool accepted;
};

struct ReconstructionResult {
  double rho = 0.0;
  Graph graph;
  std::optional<std::size_t> mismatch;
  std::vector<CorrectionEntry> correction_log;
  double total_error_before = 0.0;
  double total_error_after = 0.0;
};

/// Per-node curvature error |R(y_i) - F_rho(i)| on a reconstructed graph.
std::vector<double> curvature_errors(const Embedding& emb, const Graph& g, double gamma);

/// Local repair: nodes whose curvature error exceeds the given percentile are
/// visited in descending error order; each one's incident edges are
/// re-thresholded at rho + step (reconstructed Forman below the manifold
/// value) or rho - step (above it), and the change is kept only if the summed
/// error over the affected nodes decreases.
ReconstructionResult curvature_correction(const Embedding& emb, const Graph& reconstructed,
                                          double percentile, double rho, double step,
                                          double gamma);

}  // namespace hetemb
