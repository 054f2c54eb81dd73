#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hetemb/embedding.hpp"
#include "hetemb/graph.hpp"

namespace hetemb {

struct NodePair {
  NodeId i;
  NodeId j;
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// Unordered pairs i < j in the same connected component.
std::vector<NodePair> connected_pairs(const DistanceMatrix& d);

/// sum over pairs of |d_M^2 / d_G^2 - 1|.
double loss_distance(const Embedding& emb, const DistanceMatrix& d, std::span<const NodePair> pairs);

/// sum_i w_i (F_i - min F + delta_hat - R_alpha(r_i))^2 with w_i = 1/(|F_i| + eps)^2
/// for the normalized variant and 1 for the raw one.
double loss_curvature(const Embedding& emb, const FormanSignal& f, const TrainConfig& cfg);

/// L_d + tau L_c. The Forman signal is not read when tau == 0.
double loss_total(const Embedding& emb, const DistanceMatrix& d, const FormanSignal* f,
                  const TrainConfig& cfg, std::span<const NodePair> pairs);

struct Gradients {
  /// Coordinate derivatives of the loss, laid out like Embedding::coords().
  std::vector<double> ambient;
  /// Riemannian gradients (tangent vectors) per node, same layout.
  std::vector<double> riemannian;
  double loss_distance = 0.0;
  double loss_curvature = 0.0;
  /// Pairs whose distance derivative was singular (antipodal sphere points).
  std::size_t skipped_pairs = 0;
  /// Number of times the Forman signal was consulted.
  std::size_t forman_reads = 0;
};

/// Gradient of L_d over `pairs` plus curvature_weight * tau * L_c over all
/// nodes.
Gradients gradients(const Embedding& emb, const DistanceMatrix& d, const FormanSignal* f,
                    const TrainConfig& cfg, std::span<const NodePair> pairs,
                    double curvature_weight = 1.0);

/// Riemannian SGD step: exp_map(p, -lr * grad) on space forms and
/// r <- (r - lr * dL/dr)_+ on the radial factor.
void rsgd_step(Embedding& emb, std::span<const double> riemannian_grads, double lr);

}  // namespace hetemb
