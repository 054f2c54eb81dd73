#include "hetemb/manifold.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hetemb/rotsym.hpp"

namespace hetemb {

std::size_t FactorSpec::coord_size() const {
  switch (kind) {
    case FactorKind::Euclidean:
      return static_cast<std::size_t>(dim);
    case FactorKind::Sphere:
    case FactorKind::Hyperbolic:
      return static_cast<std::size_t>(dim) + 1;
    case FactorKind::RotSym:
      return 1;
  }
  return 0;
}

ManifoldSpec::ManifoldSpec(std::vector<FactorSpec> factors) : factors_(std::move(factors)) {
  layout();
}

void ManifoldSpec::layout() {
  offsets_.clear();
  stride_ = 0;
  std::size_t rot = 0;
  for (const auto& f : factors_) {
    if (f.kind == FactorKind::RotSym) {
      ++rot;
      if (!f.alpha_auto && !(f.alpha > 0.0)) throw ShapeError("rotsym alpha must be positive");
    } else if (f.dim < 1) {
      throw ShapeError("space-form dimension must be at least 1");
    }
    if (!(f.scale > 0.0)) throw ShapeError("factor scale must be positive");
    offsets_.push_back(stride_);
    stride_ += f.coord_size();
  }
  if (rot > 1) throw ShapeError("at most one rotationally symmetric factor is allowed");
}

namespace {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ShapeError("bad number '" + s + "' in " + context);
  }
  return v;
}

std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (depth != 0) throw ShapeError("unbalanced parentheses in manifold spec");
  out.push_back(cur);
  return out;
}

// Parses "key=value,key=value" inside an atom's parentheses.
void apply_params(FactorSpec& f, const std::string& params, const std::string& atom) {
  std::size_t start = 0;
  while (start <= params.size()) {
    std::size_t end = params.find(',', start);
    if (end == std::string::npos) end = params.size();
    std::string kv = params.substr(start, end - start);
    start = end + 1;
    if (kv.empty()) continue;
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ShapeError("expected key=value in '" + atom + "'");
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    if (key == "l") {
      f.scale = parse_double(value, atom);
      f.scale_set = true;
    } else if (key == "a" && f.kind == FactorKind::RotSym) {
      if (value == "auto") {
        f.alpha_auto = true;
      } else {
        f.alpha = parse_double(value, atom);
        f.alpha_auto = false;
      }
    } else {
      throw ShapeError("unknown parameter '" + key + "' in '" + atom + "'");
    }
  }
}

}  // namespace

ManifoldSpec ManifoldSpec::parse(const std::string& text) {
  std::vector<FactorSpec> factors;
  for (const std::string& atom : split_top_level(text)) {
    if (atom.empty()) throw ShapeError("empty factor in manifold spec '" + text + "'");
    std::string head = atom;
    std::string params;
    if (auto open = atom.find('('); open != std::string::npos) {
      if (atom.back() != ')') throw ShapeError("malformed factor '" + atom + "'");
      head = atom.substr(0, open);
      params = atom.substr(open + 1, atom.size() - open - 2);
    }
    FactorSpec f;
    if (head == "rot") {
      f.kind = FactorKind::RotSym;
      f.dim = 3;
    } else {
      switch (head.empty() ? '\0' : head[0]) {
        case 'e': f.kind = FactorKind::Euclidean; break;
        case 's': f.kind = FactorKind::Sphere; break;
        case 'h': f.kind = FactorKind::Hyperbolic; break;
        default: throw ShapeError("unknown factor '" + atom + "'");
      }
      std::string digits = head.substr(1);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
        throw ShapeError("missing dimension in factor '" + atom + "'");
      }
      f.dim = std::stoi(digits);
    }
    apply_params(f, params, atom);
    factors.push_back(f);
  }
  return ManifoldSpec(std::move(factors));
}

std::string ManifoldSpec::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const FactorSpec& f = factors_[k];
    if (k) out += ',';
    switch (f.kind) {
      case FactorKind::Euclidean: out += 'e' + std::to_string(f.dim); break;
      case FactorKind::Sphere: out += 's' + std::to_string(f.dim); break;
      case FactorKind::Hyperbolic: out += 'h' + std::to_string(f.dim); break;
      case FactorKind::RotSym:
        out += "rot(a=" + (f.alpha_auto ? std::string("auto") : format_double(f.alpha));
        if (f.scale_set) out += ",l=" + format_double(f.scale);
        out += ')';
        continue;
    }
    if (f.scale_set) out += "(l=" + format_double(f.scale) + ")";
  }
  return out;
}

std::optional<std::size_t> ManifoldSpec::rotsym_index() const {
  for (std::size_t k = 0; k < factors_.size(); ++k)
    if (factors_[k].kind == FactorKind::RotSym) return k;
  return std::nullopt;
}

std::optional<std::size_t> ManifoldSpec::radial_coord() const {
  if (auto k = rotsym_index()) return offsets_[*k];
  return std::nullopt;
}

double ManifoldSpec::homogeneous_curvature() const {
  double total = 0.0;
  for (const auto& f : factors_) {
    const double d = f.dim;
    const double s2 = f.scale * f.scale;
    if (f.kind == FactorKind::Sphere) total += d * (d - 1.0) / s2;
    if (f.kind == FactorKind::Hyperbolic) total -= d * (d - 1.0) / s2;
  }
  return total;
}

ManifoldSpec ManifoldSpec::without_rotsym() const {
  std::vector<FactorSpec> kept;
  for (const auto& f : factors_)
    if (f.kind != FactorKind::RotSym) kept.push_back(f);
  return ManifoldSpec(std::move(kept));
}

double minkowski_dot(PointView x, PointView y) {
  const std::size_t d = x.size() - 1;
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += x[k] * y[k];
  return s - x[d] * y[d];
}

namespace {

constexpr double kPi = std::numbers::pi;

double dot(PointView x, PointView y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

void check_layout(const ManifoldSpec& spec, std::size_t size, const char* what) {
  if (size != spec.stride()) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(spec.stride()) +
                     " coordinates, got " + std::to_string(size));
  }
}

PointView block(const ManifoldSpec& spec, PointView p, std::size_t k) {
  return p.subspan(spec.offset(k), spec.factor(k).coord_size());
}

std::span<double> block(const ManifoldSpec& spec, std::span<double> p, std::size_t k) {
  return p.subspan(spec.offset(k), spec.factor(k).coord_size());
}

void reproject_block(FactorKind kind, std::span<double> x) {
  if (kind == FactorKind::Sphere) {
    const double norm = std::sqrt(dot(x, x));
    for (double& c : x) c /= norm;
  } else if (kind == FactorKind::Hyperbolic) {
    const std::size_t d = x.size() - 1;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += x[k] * x[k];
    x[d] = std::sqrt(1.0 + s);
  } else if (kind == FactorKind::RotSym) {
    x[0] = std::max(x[0], 0.0);
  }
}

void exp_block(FactorKind kind, std::span<double> x, PointView v) {
  switch (kind) {
    case FactorKind::Euclidean:
      for (std::size_t k = 0; k < x.size(); ++k) x[k] += v[k];
      return;
    case FactorKind::RotSym:
      x[0] = std::max(x[0] + v[0], 0.0);
      return;
    case FactorKind::Sphere:
    case FactorKind::Hyperbolic: {
      const bool hyp = kind == FactorKind::Hyperbolic;
      const double nv2 = hyp ? minkowski_dot(v, v) : dot(v, v);
      const double nv = std::sqrt(std::max(nv2, 0.0));
      if (nv < 1e-300) return;
      const double c = hyp ? std::cosh(nv) : std::cos(nv);
      const double s = (hyp ? std::sinh(nv) : std::sin(nv)) / nv;
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = c * x[k] + s * v[k];
      reproject_block(kind, x);
      return;
    }
  }
}

}  // namespace

Point base_point(const ManifoldSpec& spec) {
  Point p(spec.stride(), 0.0);
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    if (f.kind == FactorKind::Sphere || f.kind == FactorKind::Hyperbolic) {
      p[spec.offset(k) + f.coord_size() - 1] = 1.0;
    }
  }
  return p;
}

double factor_distance(const FactorSpec& f, PointView p, PointView q) {
  switch (f.kind) {
    case FactorKind::Euclidean: {
      double s = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
      return std::sqrt(s);
    }
    case FactorKind::Sphere: {
      // Chord forms avoid the cancellation of acos near 0 and pi.
      const double c = dot(p, q);
      double chord = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double e = c >= 0.0 ? p[k] - q[k] : p[k] + q[k];
        chord += e * e;
      }
      const double half = 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(chord)));
      return c >= 0.0 ? half : kPi - half;
    }
    case FactorKind::Hyperbolic: {
      const double u = -minkowski_dot(p, q);
      if (u > 2.0) return std::acosh(u);
      // <p-q, p-q> = 4 sinh^2(d/2) on the hyperboloid.
      double m = 0.0;
      for (std::size_t k = 0; k + 1 < p.size(); ++k) m += (p[k] - q[k]) * (p[k] - q[k]);
      const double t = p.back() - q.back();
      m -= t * t;
      return 2.0 * std::asinh(0.5 * std::sqrt(std::max(m, 0.0)));
    }
    case FactorKind::RotSym:
      return std::abs(p[0] - q[0]);
  }
  return 0.0;
}

double squared_distance(const ManifoldSpec& spec, PointView p, PointView q) {
  check_layout(spec, p.size(), "distance");
  check_layout(spec, q.size(), "distance");
  double total = 0.0;
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    const double d = factor_distance(f, block(spec, p, k), block(spec, q, k));
    total += f.scale * f.scale * d * d;
  }
  return total;
}

double distance(const ManifoldSpec& spec, PointView p, PointView q) {
  return std::sqrt(squared_distance(spec, p, q));
}

double metric_inner(const ManifoldSpec& spec, PointView p, PointView u, PointView v) {
  check_layout(spec, p.size(), "metric_inner");
  double total = 0.0;
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    auto ub = block(spec, u, k);
    auto vb = block(spec, v, k);
    const double g = f.kind == FactorKind::Hyperbolic ? minkowski_dot(ub, vb) : dot(ub, vb);
    total += f.scale * f.scale * g;
  }
  return total;
}

Point project_tangent(const ManifoldSpec& spec, PointView p, PointView v) {
  check_layout(spec, p.size(), "project_tangent");
  check_layout(spec, v.size(), "project_tangent");
  Point out(v.begin(), v.end());
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    auto x = block(spec, p, k);
    auto w = block(spec, std::span<double>(out), k);
    if (f.kind == FactorKind::Sphere) {
      const double c = dot(x, w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * x[i];
    } else if (f.kind == FactorKind::Hyperbolic) {
      const double c = minkowski_dot(x, w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += c * x[i];
    }
  }
  return out;
}

void reproject(const ManifoldSpec& spec, std::span<double> p) {
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    reproject_block(spec.factor(k).kind, block(spec, p, k));
  }
}

Point exp_map(const ManifoldSpec& spec, PointView p, PointView v) {
  check_layout(spec, p.size(), "exp_map");
  check_layout(spec, v.size(), "exp_map");
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    if (f.kind != FactorKind::Sphere && f.kind != FactorKind::Hyperbolic) continue;
    auto x = block(spec, p, k);
    auto w = block(spec, v, k);
    const double normal = f.kind == FactorKind::Sphere ? dot(x, w) : minkowski_dot(x, w);
    const double tol = 1e-9 * std::max(1.0, std::sqrt(dot(x, x) * dot(w, w)));
    if (std::abs(normal) > tol) {
      throw ContractViolation("exp_map: vector is not tangent to factor " + std::to_string(k) +
                              " (normal component " + std::to_string(normal) + ")");
    }
  }
  Point out(p.begin(), p.end());
  exp_map_inplace(spec, out, v);
  return out;
}

void exp_map_inplace(const ManifoldSpec& spec, std::span<double> p, PointView v) {
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    exp_block(spec.factor(k).kind, block(spec, p, k), block(spec, v, k));
  }
}

Point riemannian_gradient(const ManifoldSpec& spec, PointView p, PointView ambient_grad) {
  check_layout(spec, p.size(), "riemannian_gradient");
  check_layout(spec, ambient_grad.size(), "riemannian_gradient");
  Point h(ambient_grad.begin(), ambient_grad.end());
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    auto w = block(spec, std::span<double>(h), k);
    if (f.kind == FactorKind::Hyperbolic) w.back() = -w.back();  // inverse Minkowski metric
  }
  Point g = project_tangent(spec, p, h);
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    const double inv = 1.0 / (f.scale * f.scale);
    for (double& c : block(spec, std::span<double>(g), k)) c *= inv;
  }
  return g;
}

double scalar_curvature(const ManifoldSpec& spec, PointView p) {
  check_layout(spec, p.size(), "scalar_curvature");
  double total = spec.homogeneous_curvature();
  if (auto k = spec.rotsym_index()) {
    const auto& f = spec.factor(*k);
    total += rotsym::curvature(f.alpha, p[spec.offset(*k)]) / (f.scale * f.scale);
  }
  return total;
}

void validate_point(const ManifoldSpec& spec, PointView p, double tol) {
  check_layout(spec, p.size(), "point");
  for (std::size_t k = 0; k < spec.factors().size(); ++k) {
    const auto& f = spec.factor(k);
    auto x = block(spec, p, k);
    for (double c : x) {
      if (!std::isfinite(c)) throw ContractViolation("point has non-finite coordinate");
    }
    if (f.kind == FactorKind::Sphere) {
      if (std::abs(std::sqrt(dot(x, x)) - 1.0) > tol) {
        throw ContractViolation("sphere block is off the unit sphere");
      }
    } else if (f.kind == FactorKind::Hyperbolic) {
      const double q = minkowski_dot(x, x);
      // Relative to the size of the coordinates, which bounds rounding error.
      if (std::abs(q + 1.0) > tol * std::max(1.0, x.back() * x.back()) || x.back() <= 0.0) {
        throw ContractViolation("hyperboloid block is off the upper sheet");
      }
    } else if (f.kind == FactorKind::RotSym) {
      if (x[0] < 0.0) throw ContractViolation("radial coordinate is negative");
    }
  }
}

}  // namespace hetemb
