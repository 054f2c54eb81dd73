#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetemb {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class FactorKind { Euclidean, Sphere, Hyperbolic, RotSym };

/// One factor of a product manifold. Space forms carry an intrinsic dimension;
/// the rotationally symmetric factor is stored by its radial coordinate only.
/// The factor metric is scale^2 times the unit metric.
struct FactorSpec {
  FactorKind kind = FactorKind::Euclidean;
  int dim = 1;
  double alpha = 1.0;       // rotsym only
  bool alpha_auto = false;  // resolved from the Forman range at training start
  double scale = 1.0;
  bool scale_set = false;   // true when the textual spec gave l=...

  /// Number of stored coordinates for a point on this factor.
  std::size_t coord_size() const;
  bool is_space_form() const { return kind != FactorKind::RotSym; }

  friend bool operator==(const FactorSpec&, const FactorSpec&) = default;
};

/// Ordered product of factors, at most one of which is rotationally symmetric.
///
/// Textual form: comma-separated atoms such as "h5,h5,rot(a=auto,l=0.5)",
/// "e2", "s5(l=2)". Coordinates of a point are the concatenation of the factor
/// blocks in order; sphere and hyperboloid blocks have dim+1 entries with the
/// distinguished (north / time-like) coordinate last.
class ManifoldSpec {
 public:
  ManifoldSpec() = default;
  explicit ManifoldSpec(std::vector<FactorSpec> factors);

  static ManifoldSpec parse(const std::string& text);
  std::string to_string() const;

  const std::vector<FactorSpec>& factors() const { return factors_; }
  const FactorSpec& factor(std::size_t k) const { return factors_[k]; }
  FactorSpec& mutable_factor(std::size_t k) { return factors_[k]; }
  std::size_t offset(std::size_t k) const { return offsets_[k]; }
  std::size_t stride() const { return stride_; }

  std::optional<std::size_t> rotsym_index() const;
  bool has_rotsym() const { return rotsym_index().has_value(); }
  /// Index of the radial coordinate inside a point, when a rotsym factor exists.
  std::optional<std::size_t> radial_coord() const;

  /// Sum over space-form factors of sign * d(d-1) / scale^2.
  double homogeneous_curvature() const;

  /// Spec with the rotsym factor removed.
  ManifoldSpec without_rotsym() const;

  friend bool operator==(const ManifoldSpec& a, const ManifoldSpec& b) {
    return a.factors_ == b.factors_;
  }

 private:
  void layout();

  std::vector<FactorSpec> factors_;
  std::vector<std::size_t> offsets_;
  std::size_t stride_ = 0;
};

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Minkowski product <x,y> = sum_{k<d} x_k y_k - x_d y_d.
double minkowski_dot(PointView x, PointView y);

/// Base point of each factor: origin, north pole, hyperboloid apex, r = 0.
Point base_point(const ManifoldSpec& spec);

/// Distance on one factor without its scale.
double factor_distance(const FactorSpec& f, PointView p, PointView q);

double squared_distance(const ManifoldSpec& spec, PointView p, PointView q);
double distance(const ManifoldSpec& spec, PointView p, PointView q);

/// Inner product of tangent vectors u, v at p under the scaled product metric.
double metric_inner(const ManifoldSpec& spec, PointView p, PointView u, PointView v);

/// Projects an ambient vector onto the tangent space at p (identity on
/// Euclidean and radial blocks).
Point project_tangent(const ManifoldSpec& spec, PointView p, PointView v);

/// Pushes each curved block back onto its constraint surface.
void reproject(const ManifoldSpec& spec, std::span<double> p);

Point exp_map(const ManifoldSpec& spec, PointView p, PointView v);
/// In-place variant used by the optimizer; no tangency check.
void exp_map_inplace(const ManifoldSpec& spec, std::span<double> p, PointView v);

/// Converts the coordinate derivative of a function into its Riemannian
/// gradient under the scaled product metric.
Point riemannian_gradient(const ManifoldSpec& spec, PointView p, PointView ambient_grad);

/// R_h + R_alpha(r)/scale^2.
double scalar_curvature(const ManifoldSpec& spec, PointView p);

/// Checks layout and constraint invariants; throws ShapeError or ContractViolation.
void validate_point(const ManifoldSpec& spec, PointView p, double tol = 1e-9);

}  // namespace hetemb
