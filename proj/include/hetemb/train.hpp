#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetemb/embedding.hpp"
#include "hetemb/graph.hpp"
#include "hetemb/loss.hpp"

namespace hetemb {

/// Raised when the loss or a coordinate becomes non-finite during training.
class NumericAbort : public std::runtime_error {
 public:
  NumericAbort(const std::string& what, std::string state)
      : std::runtime_error(what), state_(std::move(state)) {}
  const std::string& state_dump() const { return state_; }

 private:
  std::string state_;
};

struct EpochRecord {
  int epoch = 0;
  double loss_distance = 0.0;
  double loss_curvature = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  Embedding embedding;
  std::vector<EpochRecord> history;
  std::size_t skipped_pairs = 0;
  /// Times the curvature term consulted the Forman signal (0 when tau == 0).
  std::size_t forman_reads = 0;
  bool forman_computed = false;
  std::vector<std::string> warnings;
};

/// Random start: space-form blocks are exp_map images of tangent vectors of
/// norm at most cfg.init_tangent_norm at the base point; radii are uniform on
/// the radial_init interval. Deterministic in cfg.seed.
Embedding initialize(const ManifoldSpec& spec, const Graph& g, const TrainConfig& cfg);

/// Resolves alpha=auto and the rotsym scale, and fills the shift constants
/// used by the curvature loss.
void resolve_curvature_setup(Embedding& emb, const FormanSignal& f, const TrainConfig& cfg,
                             std::vector<std::string>* warnings = nullptr);

/// Learning rate for an epoch under the step-decay schedule.
double scheduled_lr(const TrainConfig& cfg, int epoch);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Riemannian SGD on L_d + tau L_c. Each step scales the gradient by
/// n / (2 |batch|), i.e. by the reciprocal of the average number of pairs a
/// node takes part in, so the learning rate is independent of graph size.
TrainResult train(const Graph& g, const ManifoldSpec& spec, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace hetemb
