#include "hetemb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hetemb {

using Json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return in;
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    out[key] = value;
  }
  return out;
}

ConfigMap parse_config_file(const std::string& path) {
  auto in = open_in(path);
  return parse_config(in);
}

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys{
      "tau",         "epsilon",        "gamma",          "ell_plus",          "delta",
      "lambda_rot",  "learning_rate",  "lr_decay",       "lr_decay_at",       "epochs",
      "batch_pairs", "seed",           "radial_init_lo", "radial_init_hi",    "init_tangent_norm",
      "curvature_loss"};
  return keys;
}

double parse_double(const std::string& key, const std::string& value) {
  double x = 0.0;
  const char* end = value.data() + value.size();
  auto [p, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || p != end) throw std::invalid_argument(key + ": not a number: '" + value + "'");
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t x = 0;
  const char* end = value.data() + value.size();
  auto [p, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || p != end) throw std::invalid_argument(key + ": not an integer: '" + value + "'");
  return x;
}

void apply_train_config(const ConfigMap& cfg, TrainConfig& out) {
  for (const auto& [key, value] : cfg) {
    auto nonneg = [&] {
      const std::int64_t v = parse_int(key, value);
      if (v < 0) throw std::invalid_argument(key + " must be nonnegative");
      return v;
    };
    if (key == "tau") out.tau = parse_double(key, value);
    else if (key == "epsilon") out.epsilon = parse_double(key, value);
    else if (key == "gamma") out.gamma = parse_double(key, value);
    else if (key == "ell_plus") out.ell_plus = parse_double(key, value);
    else if (key == "delta") out.delta = parse_double(key, value);
    else if (key == "lambda_rot") out.lambda_rot = parse_double(key, value);
    else if (key == "learning_rate") out.learning_rate = parse_double(key, value);
    else if (key == "lr_decay") out.lr_decay = parse_double(key, value);
    else if (key == "lr_decay_at") out.lr_decay_at = parse_double(key, value);
    else if (key == "epochs") out.epochs = static_cast<int>(nonneg());
    else if (key == "batch_pairs") out.batch_pairs = value == "all" ? 0 : static_cast<std::size_t>(nonneg());
    else if (key == "seed") out.seed = static_cast<std::uint64_t>(nonneg());
    else if (key == "radial_init_lo") out.radial_init_lo = parse_double(key, value);
    else if (key == "radial_init_hi") out.radial_init_hi = parse_double(key, value);
    else if (key == "init_tangent_norm") out.init_tangent_norm = parse_double(key, value);
    else if (key == "curvature_loss") {
      if (value == "normalized") out.curvature_loss = CurvatureLossKind::Normalized;
      else if (value == "raw") out.curvature_loss = CurvatureLossKind::Raw;
      else throw std::invalid_argument("curvature_loss must be normalized or raw");
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  out.validate();
}

std::string format_double(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, p);
}

void save_embedding(const Embedding& emb, std::ostream& out, const std::vector<std::int64_t>& ids) {
  if (!ids.empty() && ids.size() != emb.size()) throw ShapeError("save_embedding: id count mismatch");
  Json doc;
  doc["format_version"] = kEmbeddingFormatVersion;
  doc["manifold"] = emb.spec().to_string();
  if (emb.shift) {
    const ShiftConstants& s = *emb.shift;
    doc["shift_constants"] = {{"min_forman", s.min_forman},
                              {"max_forman", s.max_forman},
                              {"delta_hat", s.delta_hat},
                              {"lambda", s.lambda},
                              {"homogeneous_curvature", s.homogeneous_curvature},
                              {"gamma", s.gamma}};
  } else {
    doc["shift_constants"] = nullptr;
  }
  doc["config_digest"] = emb.provenance.config_digest;
  doc["seed"] = emb.provenance.seed;
  doc["epochs"] = emb.provenance.epochs;
  doc["scale_mode"] = emb.provenance.scale_mode;
  Json nodes = Json::array();
  const ManifoldSpec& spec = emb.spec();
  for (std::size_t i = 0; i < emb.size(); ++i) {
    Json blocks = Json::array();
    const PointView p = emb.point(i);
    for (std::size_t k = 0; k < spec.factors().size(); ++k) {
      const auto block = p.subspan(spec.offset(k), spec.factor(k).coord_size());
      blocks.push_back(Json(std::vector<double>(block.begin(), block.end())));
    }
    nodes.push_back({{"id", ids.empty() ? static_cast<std::int64_t>(i) : ids[i]}, {"blocks", blocks}});
  }
  doc["nodes"] = std::move(nodes);
  out << doc.dump(1) << "\n";
}

void save_embedding_file(const Embedding& emb, const std::string& path,
                         const std::vector<std::int64_t>& ids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  save_embedding(emb, out, ids);
}

Embedding load_embedding(std::istream& in, std::vector<std::int64_t>* ids) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, std::string("embedding JSON: ") + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kEmbeddingFormatVersion) {
      throw ParseError(0, "unsupported embedding format_version " + std::to_string(version));
    }
    const ManifoldSpec spec = ManifoldSpec::parse(doc.at("manifold").get<std::string>());
    const Json& nodes = doc.at("nodes");
    Embedding emb(spec, nodes.size());
    if (ids) ids->clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Json& blocks = nodes[i].at("blocks");
      if (blocks.size() != spec.factors().size()) throw ShapeError("node " + std::to_string(i) + ": wrong block count");
      auto p = emb.point(i);
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto values = blocks[k].get<std::vector<double>>();
        if (values.size() != spec.factor(k).coord_size()) {
          throw ShapeError("node " + std::to_string(i) + ": block " + std::to_string(k) + " has wrong size");
        }
        std::copy(values.begin(), values.end(), p.begin() + static_cast<std::ptrdiff_t>(spec.offset(k)));
      }
      validate_point(spec, emb.point(i), 1e-6);
      if (ids) ids->push_back(nodes[i].at("id").get<std::int64_t>());
    }
    const Json& sc = doc.at("shift_constants");
    if (!sc.is_null()) {
      ShiftConstants s;
      s.min_forman = sc.at("min_forman").get<double>();
      s.max_forman = sc.at("max_forman").get<double>();
      s.delta_hat = sc.at("delta_hat").get<double>();
      s.lambda = sc.at("lambda").get<double>();
      s.homogeneous_curvature = sc.at("homogeneous_curvature").get<double>();
      s.gamma = sc.at("gamma").get<double>();
      emb.shift = s;
    }
    emb.provenance.config_digest = doc.value("config_digest", std::string());
    emb.provenance.seed = doc.value("seed", std::uint64_t{0});
    emb.provenance.epochs = doc.value("epochs", 0);
    emb.provenance.scale_mode = doc.value("scale_mode", std::string("fixed"));
    return emb;
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("embedding JSON: ") + e.what());
  }
}

Embedding load_embedding_file(const std::string& path, std::vector<std::int64_t>* ids) {
  auto in = open_in(path);
  return load_embedding(in, ids);
}

namespace {

Json opt(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

}  // namespace

std::string eval_report_json(const EvalReport& r) {
  Json doc;
  doc["ad_d"] = r.ad_d;
  doc["map"] = r.map;
  doc["ad_c"] = opt(r.ad_c);
  doc["forman_variance"] = r.forman_variance;
  doc["ad_triangle"] = opt(r.ad_triangle);
  doc["n_pairs_used"] = r.n_pairs_used;
  doc["notes"] = r.notes;
  return doc.dump(1) + "\n";
}

std::string reconstruction_json(const ReconstructionResult& r,
                                const std::optional<TriangleComparison>& triangles) {
  Json doc;
  doc["rho"] = r.rho;
  doc["num_nodes"] = r.graph.num_nodes();
  Json edges = Json::array();
  for (const Edge& e : r.graph.edges()) edges.push_back({e.u, e.v});
  doc["edges"] = std::move(edges);
  doc["mismatch"] = r.mismatch ? Json(*r.mismatch) : Json(nullptr);
  Json log = Json::array();
  for (const CorrectionEntry& c : r.correction_log) {
    log.push_back({{"node", c.node},
                   {"action", c.action},
                   {"edges_changed", c.edges_changed},
                   {"err_before", c.err_before},
                   {"err_after", c.err_after},
                   {"accepted", c.accepted}});
  }
  doc["correction_log"] = std::move(log);
  doc["total_error_before"] = r.total_error_before;
  doc["total_error_after"] = r.total_error_after;
  if (triangles) {
    doc["ad_triangle"] = {{"nn_only", triangles->nn_only}, {"curvature", triangles->curvature}};
  } else {
    doc["ad_triangle"] = nullptr;
  }
  return doc.dump(1) + "\n";
}

void write_history_csv(const std::vector<EpochRecord>& history, std::ostream& out) {
  out << "epoch,loss_distance,loss_curvature,wall_ms\n";
  for (const EpochRecord& e : history) {
    out << e.epoch << ',' << format_double(e.loss_distance) << ',' << format_double(e.loss_curvature)
        << ',' << format_double(e.wall_ms) << '\n';
  }
}

void write_stats_csv(const RunSet& runs, std::ostream& out) {
  out << "run,degree_mean,degree_var,degree_std,clustering_mean,clustering_var,clustering_std,"
         "max_clique,clique_exact\n";
  for (std::size_t k = 0; k < runs.stats.size(); ++k) {
    const GraphStats& s = runs.stats[k];
    out << k << ',' << format_double(s.degree_mean) << ',' << format_double(s.degree_var) << ','
        << format_double(std::sqrt(s.degree_var)) << ',' << format_double(s.clustering_mean) << ','
        << format_double(s.clustering_var) << ',' << format_double(std::sqrt(s.clustering_var)) << ','
        << s.max_clique_size << ',' << (s.clique_exact ? 1 : 0) << '\n';
  }
  // Summary row: column means over the runs.
  const double k = static_cast<double>(std::max<std::size_t>(runs.stats.size(), 1));
  double dv = 0.0, cv = 0.0;
  bool all_exact = true;
  for (const GraphStats& s : runs.stats) {
    dv += s.degree_var;
    cv += s.clustering_var;
    all_exact = all_exact && s.clique_exact;
  }
  out << "summary," << format_double(runs.degree_mean.mean) << ',' << format_double(dv / k) << ','
      << format_double(runs.degree_std.mean) << ',' << format_double(runs.clustering_mean.mean) << ','
      << format_double(cv / k) << ',' << format_double(runs.clustering_std.mean) << ','
      << format_double(runs.max_clique.mean) << ',' << (all_exact ? 1 : 0) << '\n';
}

void write_barycenter_csv(const std::vector<double>& hist, std::ostream& out) {
  out << "degree,mass\n";
  for (std::size_t d = 0; d < hist.size(); ++d) out << d << ',' << format_double(hist[d]) << '\n';
}

void write_volume_csv(const VolumeMatch& v, const std::vector<std::int64_t>& ids, std::ostream& out) {
  out << "node,graph_ball,manifold_volume\n";
  for (std::size_t i = 0; i < v.graph_ball.size(); ++i) {
    out << (ids.empty() ? static_cast<std::int64_t>(i) : ids[i]) << ',' << format_double(v.graph_ball[i])
        << ',' << format_double(v.manifold_volume[i]) << '\n';
  }
}

}  // namespace hetemb
