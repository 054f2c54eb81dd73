#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hetemb/commands.hpp"

using namespace hetemb;

int main(int argc, char** argv) {
  CLI::App app{"hetemb: graph embeddings in product manifolds with a radial curvature factor"};
  app.require_subcommand(1);

  // embed
  EmbedArgs embed;
  std::map<std::string, std::string> train_flags;
  std::optional<std::uint64_t> embed_seed;
  auto* c_embed = app.add_subcommand("embed", "train an embedding");
  c_embed->add_option("graph", embed.graph_path, "edge list")->required();
  c_embed->add_option("--manifold,-m", embed.manifold, "e.g. h5,h5,rot(a=auto)")->required();
  c_embed->add_option("--config", embed.config_path, "key=value config file");
  c_embed->add_option("--out,-o", embed.out_path, "embedding JSON")->required();
  c_embed->add_option("--history", embed.history_path, "history CSV (default <out>.history.csv)");
  c_embed->add_option("--seed", embed_seed);
  for (const std::string& key : train_config_keys()) {
    if (key == "seed") continue;
    c_embed->add_option("--" + key, train_flags[key], "overrides the config key " + key);
  }

  // eval
  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "AD_d, mAP and curvature distortion");
  c_eval->add_option("graph", eval.graph_path)->required();
  c_eval->add_option("embedding", eval.embedding_path)->required();
  c_eval->add_option("--out,-o", eval.out_path, "report JSON (default stdout)");
  c_eval->add_flag("--normalized-forman", eval.normalized_forman);

  // reconstruct
  ReconstructArgs rec;
  std::optional<double> rec_gamma, rec_step;
  auto* c_rec = app.add_subcommand("reconstruct", "threshold reconstruction of the graph");
  c_rec->add_option("graph", rec.graph_path)->required();
  c_rec->add_option("embedding", rec.embedding_path)->required();
  c_rec->add_option("--out,-o", rec.out_path, "result JSON (default stdout)");
  c_rec->add_flag("--correct", rec.correct, "apply the curvature correction");
  c_rec->add_flag("--triangles", rec.triangles, "compare triangle estimates");
  c_rec->add_option("--gamma", rec_gamma, "Forman triangle weight (default: training value)");
  c_rec->add_option("--val-fraction", rec.val_fraction);
  c_rec->add_option("--percentile", rec.percentile);
  c_rec->add_option("--step", rec_step, "threshold step (default 0.1 rho)");
  c_rec->add_option("--seed", rec.seed);

  // generate
  GenerateArgs gen;
  std::optional<double> gen_ell;
  std::int64_t budget_ms = 10000;
  auto* c_gen = app.add_subcommand("generate", "random graphs on H^3 or H^3 x R");
  c_gen->add_option("--mode", gen.mode)->check(CLI::IsMember({"homogeneous", "heterogeneous"}));
  c_gen->add_option("--n", gen.sample.n);
  c_gen->add_option("--tangent-radius", gen.sample.tangent_radius);
  c_gen->add_option("--radial-lo", gen.sample.radial_lo);
  c_gen->add_option("--radial-hi", gen.sample.radial_hi);
  c_gen->add_option("--alpha", gen.sample.alpha);
  c_gen->add_option("--rho", gen.sample.rho);
  c_gen->add_option("--ell", gen_ell);
  c_gen->add_option("--runs", gen.sample.runs);
  c_gen->add_option("--seed", gen.sample.seed);
  c_gen->add_option("--threads", gen.sample.threads);
  c_gen->add_option("--clique-budget-ms", budget_ms);
  c_gen->add_option("--out,-o", gen.out_dir, "output directory")->required();

  // volume
  VolumeArgs vol;
  auto* c_vol = app.add_subcommand("volume", "graph ball sizes vs annular volumes");
  c_vol->add_option("graph", vol.graph_path)->required();
  c_vol->add_option("embedding", vol.embedding_path)->required();
  c_vol->add_option("--rho", vol.rho);
  c_vol->add_option("--out,-o", vol.out_path, "CSV (default stdout)");

  // stats
  StatsArgs st;
  auto* c_stats = app.add_subcommand("stats", "degree, clustering, clique and Forman summary");
  c_stats->add_option("graph", st.graph_path)->required();
  c_stats->add_option("--gamma", st.gamma);
  c_stats->add_option("--clique-budget-ms", st.clique_budget_ms);
  c_stats->add_option("--out,-o", st.out_path, "CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  if (c_embed->parsed()) {
    for (const auto& [key, value] : train_flags)
      if (c_embed->count("--" + key)) embed.overrides[key] = value;
    if (embed_seed) embed.overrides["seed"] = std::to_string(*embed_seed);
    return cmd_embed(embed, std::cerr);
  }
  if (c_eval->parsed()) return cmd_eval(eval, std::cout, std::cerr);
  if (c_rec->parsed()) {
    rec.gamma = rec_gamma;
    rec.step = rec_step;
    return cmd_reconstruct(rec, std::cout, std::cerr);
  }
  if (c_gen->parsed()) {
    gen.sample.ell = gen_ell;
    gen.sample.clique_budget = std::chrono::milliseconds(budget_ms);
    return cmd_generate(gen, std::cerr);
  }
  if (c_vol->parsed()) return cmd_volume(vol, std::cout, std::cerr);
  if (c_stats->parsed()) return cmd_stats(st, std::cout, std::cerr);
  return kExitInput;
}
