#include "hetemb/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hetemb/rotsym.hpp"

namespace hetemb {

namespace {

ManifoldSpec with_rot_scale(ManifoldSpec spec, const TrainConfig& cfg) {
  if (auto k = spec.rotsym_index()) {
    FactorSpec& f = spec.mutable_factor(*k);
    if (!f.scale_set) {
      f.scale = cfg.lambda_rot;
      f.scale_set = true;
    }
  }
  return ManifoldSpec(spec.factors());
}

std::string dump_state(const Embedding& emb, int epoch, double lr, std::size_t max_nodes = 5) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch=" << epoch << " lr=" << lr << " manifold=" << emb.spec().to_string() << '\n';
  std::size_t shown = 0;
  for (std::size_t i = 0; i < emb.size() && shown < max_nodes; ++i) {
    auto p = emb.point(i);
    bool bad = std::any_of(p.begin(), p.end(), [](double c) { return !std::isfinite(c); });
    if (!bad) continue;
    ++shown;
    os << "node " << i << ":";
    for (double c : p) os << ' ' << c;
    os << '\n';
  }
  if (shown == 0) os << "all coordinates finite\n";
  return os.str();
}

}  // namespace

Embedding initialize(const ManifoldSpec& spec_in, const Graph& g, const TrainConfig& cfg) {
  cfg.validate();
  ManifoldSpec spec = with_rot_scale(spec_in, cfg);
  Embedding emb(spec, g.num_nodes());
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> radial(cfg.radial_init_lo, cfg.radial_init_hi);

  const Point base = base_point(spec);
  Point v(spec.stride());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t k = 0; k < spec.factors().size(); ++k) {
      const FactorSpec& f = spec.factor(k);
      if (f.kind == FactorKind::RotSym) continue;
      // Components uniform in a cube inscribed in the tangent ball; the
      // distinguished last coordinate of curved blocks stays 0 (tangent at base).
      const double a = cfg.init_tangent_norm / std::sqrt(static_cast<double>(f.dim));
      for (int c = 0; c < f.dim; ++c) v[spec.offset(k) + static_cast<std::size_t>(c)] = a * unit(rng);
    }
    auto p = emb.point(i);
    std::copy(base.begin(), base.end(), p.begin());
    exp_map_inplace(spec, p, v);
    if (auto rc = spec.radial_coord()) p[*rc] = radial(rng);
  }
  emb.provenance.seed = cfg.seed;
  emb.provenance.epochs = 0;
  emb.provenance.config_digest = cfg.digest();
  return emb;
}

void resolve_curvature_setup(Embedding& emb, const FormanSignal& f, const TrainConfig& cfg,
                             std::vector<std::string>* warnings) {
  auto k = emb.spec().rotsym_index();
  if (!k) return;
  FactorSpec& rot = emb.mutable_spec().mutable_factor(*k);
  rotsym::AlphaChoice choice =
      rotsym::alpha_from_range(f.max_node, f.min_node, cfg.delta, cfg.ell_plus);
  if (rot.alpha_auto) {
    rot.alpha = choice.alpha;
    rot.alpha_auto = false;
  }
  ShiftConstants s;
  s.min_forman = f.min_node;
  s.max_forman = f.max_node;
  s.delta_hat = choice.delta_hat;
  s.lambda = rot.scale;
  s.homogeneous_curvature = emb.spec().homogeneous_curvature();
  s.gamma = f.gamma;
  emb.shift = s;

  if (warnings) {
    const double top = rotsym::curvature(rot.alpha, 0.0);
    const double floor = rotsym::curvature_asymptote(rot.alpha);
    const double hi_target = f.max_node - f.min_node + s.delta_hat;
    if (hi_target > top) {
      warnings->push_back("largest curvature target " + std::to_string(hi_target) +
                          " exceeds R_alpha(0) = " + std::to_string(top) +
                          "; increase ell_plus");
    }
    if (s.delta_hat <= floor) {
      warnings->push_back("smallest curvature target lies below the R_alpha asymptote");
    }
  }
}

double scheduled_lr(const TrainConfig& cfg, int epoch) {
  const int decay_epoch = static_cast<int>(std::floor(cfg.lr_decay_at * cfg.epochs));
  return epoch >= decay_epoch ? cfg.learning_rate * cfg.lr_decay : cfg.learning_rate;
}

TrainResult train(const Graph& g, const ManifoldSpec& spec, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  TrainResult result;
  result.embedding = initialize(spec, g, cfg);
  Embedding& emb = result.embedding;

  const DistanceMatrix dist = bfs_apsp(g);
  std::vector<NodePair> pairs = connected_pairs(dist);
  if (pairs.empty()) throw ContractViolation("train: the graph has no connected node pairs");

  FormanSignal forman_signal;
  const FormanSignal* fptr = nullptr;
  if (emb.spec().has_rotsym()) {
    forman_signal = forman(g, cfg.gamma);
    result.forman_computed = true;
    resolve_curvature_setup(emb, forman_signal, cfg, &result.warnings);
  } else if (cfg.tau > 0.0) {
    result.warnings.push_back("tau > 0 ignored: the manifold has no rotsym factor");
  }
  TrainConfig run_cfg = cfg;
  if (!emb.spec().has_rotsym()) run_cfg.tau = 0.0;
  if (run_cfg.tau > 0.0) fptr = &forman_signal;

  const std::size_t batch = cfg.batch_pairs == 0 ? pairs.size() : std::min(cfg.batch_pairs, pairs.size());
  const bool full_batch = batch == pairs.size();
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  const double n = static_cast<double>(g.num_nodes());

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = scheduled_lr(cfg, epoch);
    if (!full_batch) std::shuffle(pairs.begin(), pairs.end(), rng);
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t begin = 0; begin < pairs.size(); begin += batch) {
      const std::size_t end = std::min(begin + batch, pairs.size());
      std::span<const NodePair> chunk(pairs.data() + begin, end - begin);
      const double share = static_cast<double>(chunk.size()) / static_cast<double>(pairs.size());
      Gradients grads = gradients(emb, dist, fptr, run_cfg, chunk, share);
      rec.loss_distance += grads.loss_distance;
      rec.loss_curvature = grads.loss_curvature;
      result.skipped_pairs += grads.skipped_pairs;
      result.forman_reads += grads.forman_reads;
      if (!std::isfinite(grads.loss_distance) || !std::isfinite(grads.loss_curvature)) {
        throw NumericAbort("non-finite loss at epoch " + std::to_string(epoch),
                           dump_state(emb, epoch, lr));
      }
      const double step_scale = n / (2.0 * static_cast<double>(chunk.size()));
      rsgd_step(emb, grads.riemannian, lr * step_scale);
    }
    for (double c : emb.coords()) {
      if (!std::isfinite(c)) {
        throw NumericAbort("non-finite coordinate after epoch " + std::to_string(epoch),
                           dump_state(emb, epoch, lr));
      }
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  emb.provenance.epochs = cfg.epochs;
  return result;
}

}  // namespace hetemb
