#include "hetemb/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetemb/rotsym.hpp"

namespace hetemb {

std::vector<NodePair> connected_pairs(const DistanceMatrix& d) {
  std::vector<NodePair> pairs;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d.reachable(i, j)) pairs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  return pairs;
}

namespace {

double graph_distance(const DistanceMatrix& d, const NodePair& p) {
  if (p.i == p.j) throw ContractViolation("distance loss: pair of identical nodes");
  const auto i = static_cast<std::size_t>(p.i);
  const auto j = static_cast<std::size_t>(p.j);
  if (!d.reachable(i, j)) {
    throw ContractViolation("distance loss: nodes " + std::to_string(p.i) + " and " +
                            std::to_string(p.j) + " are not connected");
  }
  return static_cast<double>(d(i, j));
}

// theta / sin(theta) and theta / sinh(theta), finite at 0.
double theta_over_sin(double theta) {
  if (theta < 1e-6) return 1.0 + theta * theta / 6.0;
  return theta / std::sin(theta);
}

double theta_over_sinh(double theta) {
  if (theta < 1e-6) return 1.0 - theta * theta / 6.0;
  return theta / std::sinh(theta);
}

// Squared product distance and its coordinate derivative with respect to p
// (the derivative with respect to q follows by swapping roles). Returns false
// when the derivative is singular.
bool squared_distance_and_grad(const ManifoldSpec& spec, PointView p, PointView q, double& d2,
                               std::span<double> grad_p, std::span<double> grad_q) {
  d2 = 0.0;
  bool ok = true;
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const FactorSpec& f = spec.factor(k);
    const std::size_t off = spec.offset(k);
    const std::size_t m = f.coord_size();
    const double w = f.scale * f.scale;
    auto x = p.subspan(off, m);
    auto y = q.subspan(off, m);
    auto gx = grad_p.subspan(off, m);
    auto gy = grad_q.subspan(off, m);
    switch (f.kind) {
      case FactorKind::Euclidean:
      case FactorKind::RotSym: {
        for (std::size_t c = 0; c < m; ++c) {
          const double diff = x[c] - y[c];
          d2 += w * diff * diff;
          gx[c] = 2.0 * w * diff;
          gy[c] = -2.0 * w * diff;
        }
        break;
      }
      case FactorKind::Sphere: {
        const double theta = factor_distance(f, x, y);
        d2 += w * theta * theta;
        if (std::sin(theta) < 1e-12 && theta > 1.0) {
          ok = false;  // antipodal: the minimizing geodesic is not unique
          for (std::size_t c = 0; c < m; ++c) gx[c] = gy[c] = 0.0;
          break;
        }
        // d(theta^2)/d(cos) = -2 theta / sin(theta)
        const double coef = -2.0 * w * theta_over_sin(theta);
        for (std::size_t c = 0; c < m; ++c) {
          gx[c] = coef * y[c];
          gy[c] = coef * x[c];
        }
        break;
      }
      case FactorKind::Hyperbolic: {
        const double theta = factor_distance(f, x, y);
        d2 += w * theta * theta;
        // d(theta^2)/du = 2 theta / sinh(theta); du/dx = (-y_space, +y_time)
        const double coef = 2.0 * w * theta_over_sinh(theta);
        for (std::size_t c = 0; c + 1 < m; ++c) {
          gx[c] = -coef * y[c];
          gy[c] = -coef * x[c];
        }
        gx[m - 1] = coef * y[m - 1];
        gy[m - 1] = coef * x[m - 1];
        break;
      }
    }
  }
  return ok;
}

struct CurvatureTerm {
  double loss;
  double dr;  // derivative with respect to the radial coordinate
};

CurvatureTerm curvature_term(double forman_value, double r, double alpha, const ShiftConstants& s,
                             const TrainConfig& cfg) {
  const double target = forman_value - s.min_forman + s.delta_hat;
  const double residual = target - rotsym::curvature(alpha, r);
  double weight = 1.0;
  if (cfg.curvature_loss == CurvatureLossKind::Normalized) {
    const double denom = std::abs(forman_value) + cfg.epsilon;
    weight = 1.0 / (denom * denom);
  }
  return {weight * residual * residual,
          -2.0 * weight * residual * rotsym::curvature_derivative(alpha, r)};
}

void require_curvature_inputs(const Embedding& emb, const FormanSignal& f) {
  if (!emb.spec().has_rotsym()) throw ContractViolation("curvature loss needs a rotsym factor");
  if (!emb.shift) throw ContractViolation("curvature loss needs shift constants");
  if (f.node_values.size() != emb.size()) {
    throw ShapeError("Forman signal and embedding have different node counts");
  }
}

}  // namespace

double loss_distance(const Embedding& emb, const DistanceMatrix& d, std::span<const NodePair> pairs) {
  const ManifoldSpec& spec = emb.spec();
  double total = 0.0;
  for (const NodePair& pr : pairs) {
    const double g = graph_distance(d, pr);
    const double dm2 = squared_distance(spec, emb.point(static_cast<std::size_t>(pr.i)),
                                        emb.point(static_cast<std::size_t>(pr.j)));
    total += std::abs(dm2 / (g * g) - 1.0);
  }
  return total;
}

double loss_curvature(const Embedding& emb, const FormanSignal& f, const TrainConfig& cfg) {
  require_curvature_inputs(emb, f);
  const double alpha = emb.spec().factor(*emb.spec().rotsym_index()).alpha;
  double total = 0.0;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    total += curvature_term(f.node_values[i], *emb.radial(i), alpha, *emb.shift, cfg).loss;
  }
  return total;
}

double loss_total(const Embedding& emb, const DistanceMatrix& d, const FormanSignal* f,
                  const TrainConfig& cfg, std::span<const NodePair> pairs) {
  double total = loss_distance(emb, d, pairs);
  if (cfg.tau > 0.0) {
    if (!f) throw ContractViolation("tau > 0 requires a Forman signal");
    total += cfg.tau * loss_curvature(emb, *f, cfg);
  }
  return total;
}

Gradients gradients(const Embedding& emb, const DistanceMatrix& d, const FormanSignal* f,
                    const TrainConfig& cfg, std::span<const NodePair> pairs,
                    double curvature_weight) {
  const ManifoldSpec& spec = emb.spec();
  const std::size_t stride = spec.stride();
  Gradients out;
  out.ambient.assign(emb.size() * stride, 0.0);
  std::vector<double> gp(stride), gq(stride);

  for (const NodePair& pr : pairs) {
    const double g = graph_distance(d, pr);
    const auto i = static_cast<std::size_t>(pr.i);
    const auto j = static_cast<std::size_t>(pr.j);
    double dm2 = 0.0;
    const bool ok = squared_distance_and_grad(spec, emb.point(i), emb.point(j), dm2, gp, gq);
    const double t = dm2 / (g * g) - 1.0;
    out.loss_distance += std::abs(t);
    if (!ok) {
      ++out.skipped_pairs;
      continue;
    }
    const double coef = (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0)) / (g * g);
    if (coef == 0.0) continue;
    double* ai = out.ambient.data() + i * stride;
    double* aj = out.ambient.data() + j * stride;
    for (std::size_t c = 0; c < stride; ++c) {
      ai[c] += coef * gp[c];
      aj[c] += coef * gq[c];
    }
  }

  if (cfg.tau > 0.0) {
    if (!f) throw ContractViolation("tau > 0 requires a Forman signal");
    require_curvature_inputs(emb, *f);
    ++out.forman_reads;
    const std::size_t rc = *spec.radial_coord();
    const double alpha = spec.factor(*spec.rotsym_index()).alpha;
    const double w = cfg.tau * curvature_weight;
    for (std::size_t i = 0; i < emb.size(); ++i) {
      CurvatureTerm term = curvature_term(f->node_values[i], *emb.radial(i), alpha, *emb.shift, cfg);
      out.loss_curvature += term.loss;
      out.ambient[i * stride + rc] += w * term.dr;
    }
  }

  out.riemannian.resize(out.ambient.size());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    Point rg = riemannian_gradient(spec, emb.point(i),
                                   PointView(out.ambient).subspan(i * stride, stride));
    std::copy(rg.begin(), rg.end(), out.riemannian.begin() + static_cast<std::ptrdiff_t>(i * stride));
  }
  return out;
}

void rsgd_step(Embedding& emb, std::span<const double> riemannian_grads, double lr) {
  const ManifoldSpec& spec = emb.spec();
  const std::size_t stride = spec.stride();
  if (riemannian_grads.size() != emb.size() * stride) {
    throw ShapeError("rsgd_step: gradient layout does not match the embedding");
  }
  std::vector<double> step(stride);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    for (std::size_t c = 0; c < stride; ++c) step[c] = -lr * riemannian_grads[i * stride + c];
    exp_map_inplace(spec, emb.point(i), step);
  }
}

}  // namespace hetemb
