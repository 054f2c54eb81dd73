#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hetemb/graph.hpp"
#include "hetemb/manifold.hpp"

namespace hetemb {

/// Constants of the shifted curvature target F(x_i) - min F + delta_hat that
/// the curvature loss matched against R_alpha(r_i).
struct ShiftConstants {
  double min_forman = 0.0;
  double max_forman = 0.0;
  double delta_hat = 0.0;
  double lambda = 1.0;
  double homogeneous_curvature = 0.0;
  double gamma = 1.0;

  friend bool operator==(const ShiftConstants&, const ShiftConstants&) = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  int epochs = 0;
  std::string config_digest;
  /// How the space-form scales were obtained; only "fixed" is implemented.
  std::string scale_mode = "fixed";

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Node coordinates on a product manifold, stored row-major (one row of
/// spec.stride() doubles per node).
class Embedding {
 public:
  Embedding() = default;
  Embedding(ManifoldSpec spec, std::size_t n)
      : spec_(std::move(spec)), n_(n), coords_(n * spec_.stride(), 0.0) {}

  const ManifoldSpec& spec() const { return spec_; }
  ManifoldSpec& mutable_spec() { return spec_; }
  std::size_t size() const { return n_; }

  PointView point(std::size_t i) const {
    return PointView(coords_).subspan(i * spec_.stride(), spec_.stride());
  }
  std::span<double> point(std::size_t i) {
    return std::span<double>(coords_).subspan(i * spec_.stride(), spec_.stride());
  }
  std::optional<double> radial(std::size_t i) const {
    if (auto c = spec_.radial_coord()) return coords_[i * spec_.stride() + *c];
    return std::nullopt;
  }

  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& coords() { return coords_; }

  std::optional<ShiftConstants> shift;
  Provenance provenance;

  friend bool operator==(const Embedding& a, const Embedding& b) {
    return a.spec_ == b.spec_ && a.n_ == b.n_ && a.coords_ == b.coords_ && a.shift == b.shift &&
           a.provenance == b.provenance;
  }

 private:
  ManifoldSpec spec_;
  std::size_t n_ = 0;
  std::vector<double> coords_;
};

/// Manifold curvature at node i mapped back to the Forman scale:
/// R_alpha(r_i) + min F - delta_hat. Requires a rotsym factor and shift constants.
double reconstructed_curvature(const Embedding& emb, std::size_t i);

enum class CurvatureLossKind {
  Normalized,  // residual^2 / (|F| + epsilon)^2
  Raw,         // residual^2
};

/// Batch size 0 means "all pairs".
struct TrainConfig {
  double tau = 0.1;
  double epsilon = 1.0;
  double gamma = 1.0;
  double ell_plus = 10.0;
  double delta = 1.0;
  double lambda_rot = 1.0;
  double learning_rate = 0.05;
  double lr_decay = 0.1;
  double lr_decay_at = 0.8;
  int epochs = 3000;
  std::size_t batch_pairs = 0;
  std::uint64_t seed = 0;
  double radial_init_lo = 0.1;
  double radial_init_hi = 1.0;
  double init_tangent_norm = 0.1;
  CurvatureLossKind curvature_loss = CurvatureLossKind::Normalized;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
  /// Canonical key=value text; the digest recorded in outputs hashes this.
  std::string canonical() const;
  std::string digest() const;
};

}  // namespace hetemb
