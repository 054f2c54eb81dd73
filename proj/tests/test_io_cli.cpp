#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "hetemb/commands.hpp"
#include "hetemb/io.hpp"
#include "hetemb/train.hpp"
#include "test_util.hpp"

using namespace hetemb;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("hetemb_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string edge_file(const TempDir& d, const std::string& name, const Graph& g) {
  std::ofstream out(d.file(name));
  save_edge_list(g, out);
  return d.file(name);
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

EmbedArgs quick_embed(const std::string& graph, const std::string& manifold, const std::string& out) {
  EmbedArgs a;
  a.graph_path = graph;
  a.manifold = manifold;
  a.out_path = out;
  a.overrides = {{"epochs", "40"}};
  return a;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HETEMB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("# comment\n\n tau = 0.5 \nepochs=10 # trailing\nseed=3\ntau=0.25\n");
  const ConfigMap m = parse_config(in);
  CHECK(m.at("tau") == "0.25");
  CHECK(m.at("epochs") == "10");
  CHECK(m.size() == 3);
  std::istringstream bad("tau=1\nnot a pair\n");
  try {
    parse_config(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("train config keys") {
  TrainConfig cfg;
  apply_train_config({{"tau", "0"}, {"batch_pairs", "all"}, {"curvature_loss", "raw"}, {"seed", "17"},
                      {"epochs", "12"}, {"learning_rate", "0.01"}},
                     cfg);
  CHECK(cfg.tau == 0.0);
  CHECK(cfg.batch_pairs == 0);
  CHECK(cfg.curvature_loss == CurvatureLossKind::Raw);
  CHECK(cfg.seed == 17);
  CHECK(cfg.epochs == 12);
  CHECK(cfg.learning_rate == 0.01);
  apply_train_config({{"batch_pairs", "64"}}, cfg);
  CHECK(cfg.batch_pairs == 64);
  CHECK_THROWS_AS(apply_train_config({{"taux", "1"}}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(apply_train_config({{"tau", "abc"}}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(apply_train_config({{"epochs", "1.5"}}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(apply_train_config({{"tau", "-1"}}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(apply_train_config({{"curvature_loss", "other"}}, cfg), std::invalid_argument);
  CHECK(train_config_keys().size() == 16);
}

TEST_CASE("shortest round-trip doubles") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 1000; ++t) {
    const double x = u(rng) * std::pow(10.0, static_cast<double>(t % 40 - 20));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("embedding files round-trip exactly") {
  std::mt19937_64 rng(52);
  const ManifoldSpec spec = ManifoldSpec::parse("h3,s2(l=0.5),e2,rot(a=0.7,l=2)");
  Embedding e(spec, 9);
  for (std::size_t i = 0; i < 9; ++i) {
    Point p = testutil::random_point(spec, 2.0, rng);
    std::copy(p.begin(), p.end(), e.point(i).begin());
  }
  ShiftConstants s;
  s.min_forman = -3.25;
  s.max_forman = 4.0 / 3.0;
  s.delta_hat = 1.0 / 7.0;
  s.gamma = 4.0;
  e.shift = s;
  e.provenance.seed = 123456789012345ull;
  e.provenance.epochs = 77;
  e.provenance.config_digest = "0123456789abcdef";
  const std::vector<std::int64_t> ids{5, 9, 2, 100, 7, 8, 1, 3, 4};

  std::ostringstream first;
  save_embedding(e, first, ids);
  std::istringstream in(first.str());
  std::vector<std::int64_t> back_ids;
  const Embedding back = load_embedding(in, &back_ids);
  CHECK(back == e);
  CHECK(back_ids == ids);
  std::ostringstream second;
  save_embedding(back, second, back_ids);
  CHECK(second.str() == first.str());

  const json doc = json::parse(first.str());
  CHECK(doc["format_version"] == 1);
  CHECK(doc["manifold"] == spec.to_string());
  CHECK(doc["nodes"].size() == 9);
  CHECK(doc["nodes"][0]["blocks"].size() == 4);
  CHECK(doc["shift_constants"]["gamma"] == 4.0);
}

TEST_CASE("malformed embedding files are rejected") {
  std::istringstream garbage("{ not json");
  CHECK_THROWS_AS(load_embedding(garbage), ParseError);
  const std::string off = R"({"format_version":1,"manifold":"h2","shift_constants":null,"config_digest":"",
    "seed":0,"epochs":0,"scale_mode":"fixed","nodes":[{"id":0,"blocks":[[0.0,0.0,2.0]]}]})";
  std::istringstream off_in(off);
  CHECK_THROWS_AS(load_embedding(off_in), ContractViolation);
  const std::string shape = R"({"format_version":1,"manifold":"h2","shift_constants":null,"config_digest":"",
    "seed":0,"epochs":0,"scale_mode":"fixed","nodes":[{"id":0,"blocks":[[0.0,1.0]]}]})";
  std::istringstream shape_in(shape);
  CHECK_THROWS_AS(load_embedding(shape_in), ShapeError);
}

TEST_CASE("embed command") {
  TempDir d;
  const std::string p3 = edge_file(d, "p3.edges", path_graph(3));
  std::ostringstream err;
  EmbedArgs a = quick_embed(p3, "e2", d.file("p3.json"));
  a.overrides["tau"] = "0";
  REQUIRE(cmd_embed(a, err) == kExitOk);
  const json doc = json::parse(slurp(d.file("p3.json")));
  CHECK(doc["nodes"].size() == 3);
  for (const auto& node : doc["nodes"]) CHECK(node["blocks"].size() == 1);
  CHECK(doc["shift_constants"].is_null());
  CHECK(doc["epochs"] == 40);
  const std::string hist = slurp(d.file("p3.json") + ".history.csv");
  CHECK(hist.rfind("epoch,loss_distance,loss_curvature,wall_ms\n", 0) == 0);
  CHECK(count_lines(hist) == 41);

  const std::string ct = edge_file(d, "ct.edges", cycle_tree_graph(5, 2));
  EmbedArgs h = quick_embed(ct, "h2,h2,rot(a=auto)", d.file("ct.json"));
  REQUIRE(cmd_embed(h, err) == kExitOk);
  const json hdoc = json::parse(slurp(d.file("ct.json")));
  const FormanSignal f = forman(cycle_tree_graph(5, 2), 1.0);
  CHECK(hdoc["shift_constants"]["min_forman"] == f.min_node);
  CHECK(hdoc["shift_constants"]["max_forman"] == f.max_node);
  CHECK(hdoc["shift_constants"]["delta_hat"].get<double>() > 0.0);
  CHECK(hdoc["manifold"].get<std::string>().find("rot(a=auto") == std::string::npos);

  // Same inputs and seed: byte-identical file.
  h.out_path = d.file("ct2.json");
  REQUIRE(cmd_embed(h, err) == kExitOk);
  CHECK(slurp(d.file("ct.json")) == slurp(d.file("ct2.json")));
}

TEST_CASE("flags override the config file") {
  TempDir d;
  const std::string g = edge_file(d, "c.edges", cycle_graph(6));
  write(d.file("train.cfg"), "epochs = 30\ntau = 0.5\nseed = 4\n");
  EmbedArgs a = quick_embed(g, "e2,rot(a=auto)", d.file("out.json"));
  a.config_path = d.file("train.cfg");
  a.overrides = {{"epochs", "7"}};
  std::ostringstream err;
  REQUIRE(cmd_embed(a, err) == kExitOk);
  const json doc = json::parse(slurp(d.file("out.json")));
  CHECK(doc["epochs"] == 7);
  CHECK(doc["seed"] == 4);
  TrainConfig expect;
  expect.epochs = 7;
  expect.tau = 0.5;
  expect.seed = 4;
  CHECK(doc["config_digest"] == expect.digest());

  write(d.file("bad.cfg"), "epochs = 30\nmystery = 1\n");
  a.config_path = d.file("bad.cfg");
  CHECK(cmd_embed(a, err) == kExitInput);
  a.config_path = d.file("missing.cfg");
  CHECK(cmd_embed(a, err) == kExitInput);
}

TEST_CASE("embed reports numeric aborts with exit code 2") {
  TempDir d;
  const std::string g = edge_file(d, "c.edges", cycle_graph(6));
  EmbedArgs a = quick_embed(g, "h2", d.file("nan.json"));
  a.overrides["learning_rate"] = "1e300";
  a.overrides["tau"] = "0";
  std::ostringstream err;
  CHECK(cmd_embed(a, err) == kExitNumeric);
  CHECK_FALSE(err.str().empty());
  CHECK_FALSE(fs::exists(d.file("nan.json")));
}

TEST_CASE("eval command") {
  TempDir d;
  const std::string g = edge_file(d, "ct.edges", cycle_tree_graph(5, 2));
  std::ostringstream err, out;
  REQUIRE(cmd_embed(quick_embed(g, "h2", d.file("homog.json")), err) == kExitOk);
  EvalArgs e{g, d.file("homog.json"), "", false};
  REQUIRE(cmd_eval(e, out, err) == kExitOk);
  const json rep = json::parse(out.str());
  for (const char* key : {"ad_d", "map", "ad_c", "forman_variance", "ad_triangle", "n_pairs_used"})
    CHECK(rep.contains(key));
  CHECK(rep["ad_c"].is_null());
  CHECK(rep["forman_variance"].get<double>() > 0.0);

  REQUIRE(cmd_embed(quick_embed(g, "h2,rot(a=auto)", d.file("het.json")), err) == kExitOk);
  e.embedding_path = d.file("het.json");
  e.out_path = d.file("rep.json");
  REQUIRE(cmd_eval(e, out, err) == kExitOk);
  CHECK(json::parse(slurp(d.file("rep.json")))["ad_c"].is_number());

  const std::string other = edge_file(d, "p4.edges", path_graph(4));
  e.graph_path = other;
  CHECK(cmd_eval(e, out, err) == kExitInput);
}

TEST_CASE("reconstruct command") {
  TempDir d;
  const std::string g = edge_file(d, "ct.edges", cycle_tree_graph(6, 3));
  std::ostringstream err;
  EmbedArgs emb = quick_embed(g, "h2,rot(a=auto)", d.file("e.json"));
  emb.overrides["epochs"] = "200";
  REQUIRE(cmd_embed(emb, err) == kExitOk);

  ReconstructArgs r;
  r.graph_path = g;
  r.embedding_path = d.file("e.json");
  std::ostringstream plain;
  REQUIRE(cmd_reconstruct(r, plain, err) == kExitOk);
  const json base = json::parse(plain.str());
  CHECK(base["rho"].get<double>() > 0.0);
  CHECK(base["num_nodes"] == cycle_tree_graph(6, 3).num_nodes());
  CHECK(base["mismatch"].is_number());
  CHECK(base["correction_log"].empty());

  r.correct = true;
  r.triangles = true;
  r.percentile = 50.0;
  std::ostringstream full;
  REQUIRE(cmd_reconstruct(r, full, err) == kExitOk);
  const json res = json::parse(full.str());
  CHECK_FALSE(res["correction_log"].empty());
  for (const auto& entry : res["correction_log"]) CHECK(entry["accepted"].is_boolean());
  CHECK(res["ad_triangle"]["nn_only"].is_number());
  CHECK(res["ad_triangle"]["curvature"].is_number());
  CHECK(res["total_error_after"].get<double>() <= res["total_error_before"].get<double>());

  REQUIRE(cmd_embed(quick_embed(g, "h2", d.file("h.json")), err) == kExitOk);
  r.embedding_path = d.file("h.json");
  CHECK(cmd_reconstruct(r, full, err) == kExitInput);
}

TEST_CASE("generate command") {
  TempDir d;
  GenerateArgs a;
  a.sample.n = 120;
  a.sample.runs = 20;
  a.sample.seed = 9;
  a.out_dir = d.file("homog");
  std::ostringstream err;
  REQUIRE(cmd_generate(a, err) == kExitOk);
  const std::string stats = slurp(d.file("homog/stats.csv"));
  CHECK(count_lines(stats) == 22);  // header, 20 runs, summary
  CHECK(stats.find("\nsummary,") != std::string::npos);
  CHECK(fs::exists(d.file("homog/run_000.edges")));
  CHECK(fs::exists(d.file("homog/run_019.edges")));
  CHECK(slurp(d.file("homog/barycenter.csv")).rfind("degree,mass\n", 0) == 0);
  const json meta = json::parse(slurp(d.file("homog/meta.json")));
  CHECK(meta["tangent_radius"] == 2.75);

  // Repeat: identical bytes.
  a.out_dir = d.file("again");
  REQUIRE(cmd_generate(a, err) == kExitOk);
  for (const char* f : {"stats.csv", "barycenter.csv", "meta.json", "run_007.edges"})
    CHECK(slurp(d.file(std::string("homog/") + f)) == slurp(d.file(std::string("again/") + f)));

  // An empty curvature region reproduces the unit-threshold runs.
  a.mode = "heterogeneous";
  a.sample.ell = 100.0;
  a.sample.rho = 3.0;
  a.out_dir = d.file("het");
  REQUIRE(cmd_generate(a, err) == kExitOk);
  CHECK(slurp(d.file("het/run_003.edges")) == slurp(d.file("homog/run_003.edges")));

  a.sample.ell.reset();
  a.out_dir = d.file("noell");
  CHECK(cmd_generate(a, err) == kExitInput);
  a.mode = "sideways";
  CHECK(cmd_generate(a, err) == kExitInput);
}

TEST_CASE("volume command") {
  TempDir d;
  const Graph ctg = cycle_tree_graph(6, 2);
  const std::string g = edge_file(d, "ct.edges", ctg);
  std::ostringstream err, out;
  REQUIRE(cmd_embed(quick_embed(g, "h3,rot(a=auto)", d.file("e.json")), err) == kExitOk);
  VolumeArgs v;
  v.graph_path = g;
  v.embedding_path = d.file("e.json");
  REQUIRE(cmd_volume(v, out, err) == kExitOk);
  CHECK(out.str().rfind("node,graph_ball,manifold_volume\n", 0) == 0);
  CHECK(count_lines(out.str()) == ctg.num_nodes() + 1);

  REQUIRE(cmd_embed(quick_embed(g, "h2,rot(a=auto)", d.file("h2.json")), err) == kExitOk);
  v.embedding_path = d.file("h2.json");
  CHECK(cmd_volume(v, out, err) == kExitInput);

  write(d.file("empty.edges"), "# nothing here\n");
  v.graph_path = d.file("empty.edges");
  v.embedding_path = d.file("e.json");
  CHECK(cmd_volume(v, out, err) == kExitInput);
}

TEST_CASE("stats command") {
  TempDir d;
  const std::string g = edge_file(d, "k5.edges", complete_graph(5));
  std::ostringstream out, err;
  StatsArgs s;
  s.graph_path = g;
  REQUIRE(cmd_stats(s, out, err) == kExitOk);
  const std::string text = out.str();
  CHECK(text.rfind("nodes,edges,", 0) == 0);
  CHECK(text.find("\n5,10,4,0,1,0,5,1,") != std::string::npos);
  s.graph_path = d.file("missing.edges");
  CHECK(cmd_stats(s, out, err) == kExitInput);
}

TEST_CASE("command-line binary exit codes") {
  TempDir d;
  const std::string g = edge_file(d, "c.edges", cycle_graph(8));
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("embed " + g + " -m e2 -o " + d.file("a.json") + " --epochs 5 --tau 0 --bogus") == 1);
  CHECK(run_cli("embed " + g + " -m e2 -o " + d.file("a.json") + " --epochs 5 --tau 0") == 0);
  CHECK(run_cli("embed " + g + " -m e2 -o " + d.file("b.json") + " --epochs 5 --tau 0") == 0);
  CHECK(slurp(d.file("a.json")) == slurp(d.file("b.json")));
  CHECK(json::parse(slurp(d.file("a.json")))["epochs"] == 5);
  CHECK(run_cli("embed " + g + " -m q7 -o " + d.file("c.json")) == 1);
  CHECK(run_cli("embed " + d.file("none.edges") + " -m e2 -o " + d.file("c.json")) == 1);
  CHECK(run_cli("embed " + g + " -m h2 -o " + d.file("n.json") + " --epochs 20 --tau 0 --learning_rate 1e300") == 2);
  CHECK(run_cli("eval " + g + " " + d.file("a.json") + " -o " + d.file("r.json")) == 0);
  CHECK(run_cli("stats " + g + " -o " + d.file("s.csv")) == 0);
  CHECK(run_cli("generate --n 50 --runs 2 --out " + d.file("gen")) == 0);
  CHECK(run_cli("generate --mode flat --out " + d.file("gen2")) == 1);
}
