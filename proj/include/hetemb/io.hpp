#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hetemb/embedding.hpp"
#include "hetemb/metrics.hpp"
#include "hetemb/randgraph.hpp"
#include "hetemb/reconstruct.hpp"
#include "hetemb/train.hpp"

namespace hetemb {

using ConfigMap = std::map<std::string, std::string>;

/// Flat key=value lines; '#' starts a comment, blank lines are ignored and
/// whitespace around keys and values is trimmed. Repeated keys: last wins.
ConfigMap parse_config(std::istream& in);
ConfigMap parse_config_file(const std::string& path);

/// Keys understood by apply_train_config, in canonical order.
const std::vector<std::string>& train_config_keys();

/// Sets the TrainConfig fields named in cfg. Unknown keys and malformed values
/// throw std::invalid_argument.
void apply_train_config(const ConfigMap& cfg, TrainConfig& out);

double parse_double(const std::string& key, const std::string& value);
std::int64_t parse_int(const std::string& key, const std::string& value);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

constexpr int kEmbeddingFormatVersion = 1;

/// JSON embedding document. ids[k] is written as the id of node k (defaults
/// to k when ids is empty).
void save_embedding(const Embedding& emb, std::ostream& out,
                    const std::vector<std::int64_t>& ids = {});
void save_embedding_file(const Embedding& emb, const std::string& path,
                         const std::vector<std::int64_t>& ids = {});

/// Throws ParseError on malformed JSON and ShapeError/ContractViolation on
/// blocks that do not fit the manifold.
Embedding load_embedding(std::istream& in, std::vector<std::int64_t>* ids = nullptr);
Embedding load_embedding_file(const std::string& path, std::vector<std::int64_t>* ids = nullptr);

std::string eval_report_json(const EvalReport& r);

struct TriangleComparison {
  double nn_only = 0.0;
  double curvature = 0.0;
};

std::string reconstruction_json(const ReconstructionResult& r,
                                const std::optional<TriangleComparison>& triangles);

void write_history_csv(const std::vector<EpochRecord>& history, std::ostream& out);
void write_stats_csv(const RunSet& runs, std::ostream& out);
void write_barycenter_csv(const std::vector<double>& hist, std::ostream& out);
void write_volume_csv(const VolumeMatch& v, const std::vector<std::int64_t>& ids, std::ostream& out);

}  // namespace hetemb
