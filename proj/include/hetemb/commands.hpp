#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "hetemb/io.hpp"

// Command implementations behind the hetemb CLI. Each returns the process
// exit code: 0 success, 1 parse or input error, 2 numeric abort. Diagnostics
// go to `err`.
namespace hetemb {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNumeric = 2 };

struct EmbedArgs {
  std::string graph_path;
  std::string manifold;
  std::string config_path;  // optional
  ConfigMap overrides;      // flag values, applied after the config file
  std::string out_path;
  std::string history_path;  // defaults to out_path + ".history.csv"
};

struct EvalArgs {
  std::string graph_path;
  std::string embedding_path;
  std::string out_path;  // empty: standard output
  bool normalized_forman = false;
};

struct ReconstructArgs {
  std::string graph_path;
  std::string embedding_path;
  std::string out_path;
  bool correct = false;
  bool triangles = false;
  std::optional<double> gamma;  // defaults to the training gamma
  double val_fraction = 0.1;
  double percentile = 90.0;
  std::optional<double> step;  // defaults to 0.1 rho
  std::uint64_t seed = 0;
};

struct GenerateArgs {
  std::string mode = "homogeneous";
  SampleConfig sample;
  std::string out_dir;
};

struct VolumeArgs {
  std::string graph_path;
  std::string embedding_path;
  std::string out_path;
  double rho = 4.0;
};

struct StatsArgs {
  std::string graph_path;
  std::string out_path;
  double gamma = 1.0;
  std::int64_t clique_budget_ms = 10000;
};

int cmd_embed(const EmbedArgs& a, std::ostream& err);
int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err);
int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateArgs& a, std::ostream& err);
int cmd_volume(const VolumeArgs& a, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err);

}  // namespace hetemb
