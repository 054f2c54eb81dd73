#include "hetemb/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hetemb/clique.hpp"
#include "hetemb/train.hpp"

namespace hetemb {

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const NumericAbort& e) {
    err << "error: " << e.what() << "\n" << e.state_dump() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

struct Loaded {
  Graph graph;
  LoadReport report;
  Embedding emb;
};

Loaded load_pair(const std::string& graph_path, const std::string& embedding_path) {
  Loaded l;
  l.graph = load_edge_list_file(graph_path, &l.report);
  l.emb = load_embedding_file(embedding_path);
  if (l.graph.num_nodes() != l.emb.size()) {
    throw ShapeError("graph has " + std::to_string(l.graph.num_nodes()) + " nodes but the embedding has " +
                     std::to_string(l.emb.size()));
  }
  return l;
}

}  // namespace

int cmd_embed(const EmbedArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    if (a.out_path.empty()) throw std::invalid_argument("embed: --out is required");
    LoadReport report;
    const Graph g = load_edge_list_file(a.graph_path, &report);
    if (g.num_nodes() < 2) throw std::invalid_argument("embed: graph needs at least two nodes");
    const ManifoldSpec spec = ManifoldSpec::parse(a.manifold);
    ConfigMap cfg_map = a.config_path.empty() ? ConfigMap{} : parse_config_file(a.config_path);
    for (const auto& [k, v] : a.overrides) cfg_map[k] = v;
    TrainConfig cfg;
    apply_train_config(cfg_map, cfg);

    const TrainResult res = train(g, spec, cfg);
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    if (res.skipped_pairs) err << "note: " << res.skipped_pairs << " singular pair gradients skipped\n";
    save_embedding_file(res.embedding, a.out_path, report.original_ids);
    std::ofstream hist(a.history_path.empty() ? a.out_path + ".history.csv" : a.history_path,
                       std::ios::binary);
    if (!hist) throw std::invalid_argument("cannot write history CSV");
    write_history_csv(res.history, hist);
  });
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load_pair(a.graph_path, a.embedding_path);
    EvalOptions opts;
    opts.normalized_forman = a.normalized_forman;
    write_text(a.out_path, eval_report_json(evaluate(l.emb, l.graph, opts)), out);
  });
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load_pair(a.graph_path, a.embedding_path);
    const ThresholdChoice tc = tune_threshold(l.emb, l.graph, a.val_fraction, a.seed);
    const Graph nn = nn_graph(l.emb, tc.rho);
    const double gamma = a.gamma ? *a.gamma : (l.emb.shift ? l.emb.shift->gamma : 1.0);
    if ((a.correct || a.triangles) && !l.emb.shift) {
      throw std::invalid_argument("reconstruct: --correct and --triangles need a rotsym embedding");
    }

    ReconstructionResult res;
    if (a.correct) {
      res = curvature_correction(l.emb, nn, a.percentile, tc.rho, a.step ? *a.step : 0.1 * tc.rho, gamma);
      err << "baseline mismatch " << edge_mismatch(nn, l.graph) << "\n";
    } else {
      res.rho = tc.rho;
      res.graph = nn;
    }
    res.mismatch = edge_mismatch(res.graph, l.graph);

    std::optional<TriangleComparison> tri;
    if (a.triangles) {
      const TriangleCounts truth = triangle_counts(l.graph);
      const std::vector<double> t(truth.per_node.begin(), truth.per_node.end());
      const TriangleEstimate est = estimate_triangles(l.emb, res.graph, gamma);
      tri = TriangleComparison{avg_triangle_distortion(t, est.nn_only), avg_triangle_distortion(t, est.clamped)};
    }
    write_text(a.out_path, reconstruction_json(res, tri), out);
  });
}

int cmd_generate(const GenerateArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    SampleMode mode;
    if (a.mode == "homogeneous") mode = SampleMode::Homogeneous;
    else if (a.mode == "heterogeneous") mode = SampleMode::Heterogeneous;
    else throw std::invalid_argument("generate: --mode must be homogeneous or heterogeneous");
    if (a.out_dir.empty()) throw std::invalid_argument("generate: --out is required");
    const RunSet runs = generate_runs(a.sample, mode);

    namespace fs = std::filesystem;
    fs::create_directories(a.out_dir);
    for (std::size_t k = 0; k < runs.graphs.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "run_%03zu.edges", k);
      std::ofstream e(fs::path(a.out_dir) / name, std::ios::binary);
      save_edge_list(runs.graphs[k], e);
    }
    std::ofstream stats(fs::path(a.out_dir) / "stats.csv", std::ios::binary);
    write_stats_csv(runs, stats);
    std::ofstream bary(fs::path(a.out_dir) / "barycenter.csv", std::ios::binary);
    write_barycenter_csv(runs.degree_barycenter, bary);

    const SampleConfig& s = a.sample;
    nlohmann::ordered_json meta;
    meta["mode"] = a.mode;
    meta["n"] = s.n;
    meta["tangent_radius"] = s.tangent_radius;
    meta["radial_interval"] = {s.radial_lo, s.radial_hi};
    meta["alpha"] = s.alpha;
    meta["rho"] = s.rho;
    meta["ell"] = s.ell ? nlohmann::ordered_json(*s.ell) : nlohmann::ordered_json(nullptr);
    meta["runs"] = s.runs;
    meta["seed"] = s.seed;
    meta["clique_budget_ms"] = s.clique_budget.count();
    auto ms = [](const MeanStd& m) { return nlohmann::ordered_json{{"mean", m.mean}, {"std", m.std}}; };
    meta["summary"] = {{"degree_mean", ms(runs.degree_mean)},
                       {"degree_std", ms(runs.degree_std)},
                       {"clustering_mean", ms(runs.clustering_mean)},
                       {"clustering_std", ms(runs.clustering_std)},
                       {"max_clique", ms(runs.max_clique)}};
    std::ofstream mf(fs::path(a.out_dir) / "meta.json", std::ios::binary);
    mf << meta.dump(1) << "\n";
    for (const GraphStats& st : runs.stats)
      if (!st.clique_exact) err << "warning: clique search hit its time budget; greedy size reported\n";
  });
}

int cmd_volume(const VolumeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load_pair(a.graph_path, a.embedding_path);
    if (l.graph.num_edges() == 0) throw std::invalid_argument("volume: graph has no edges");
    const VolumeMatch v = volume_match(l.emb, bfs_apsp(l.graph), a.rho);
    std::ostringstream csv;
    write_volume_csv(v, l.report.original_ids, csv);
    write_text(a.out_path, csv.str(), out);
    err << "spearman " << spearman(v.graph_ball, v.manifold_volume) << "\n";
  });
}

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Graph g = load_edge_list_file(a.graph_path);
    const GraphStats s = graph_stats(g, std::chrono::milliseconds(a.clique_budget_ms));
    const FormanSignal f = forman(g, a.gamma);
    std::ostringstream csv;
    csv << "nodes,edges,degree_mean,degree_var,clustering_mean,clustering_var,max_clique,clique_exact,"
           "forman_min,forman_max,forman_variance\n";
    csv << g.num_nodes() << ',' << g.num_edges() << ',' << format_double(s.degree_mean) << ','
        << format_double(s.degree_var) << ',' << format_double(s.clustering_mean) << ','
        << format_double(s.clustering_var) << ',' << s.max_clique_size << ',' << (s.clique_exact ? 1 : 0)
        << ',' << format_double(f.min_node) << ',' << format_double(f.max_node) << ','
        << format_double(forman_variance(f)) << '\n';
    write_text(a.out_path, csv.str(), out);
  });
}

}  // namespace hetemb
