#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hetemb {

using NodeId = std::int32_t;

struct Edge {
  NodeId u;
  NodeId v;  // u < v
  friend bool operator==(const Edge&, const Edge&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Undirected, unweighted simple graph on nodes 0..n-1. Neighbor lists are
/// kept sorted, which makes edge lookup and triangle counting cheap.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : adj_(n) {}

  /// Builds from an edge list; self-loops and duplicates are dropped.
  static Graph from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::size_t num_nodes() const { return adj_.size(); }
  std::size_t num_edges() const;
  std::size_t degree(NodeId i) const { return adj_[static_cast<std::size_t>(i)].size(); }
  const std::vector<NodeId>& neighbors(NodeId i) const {
    return adj_[static_cast<std::size_t>(i)];
  }
  bool has_edge(NodeId i, NodeId j) const;

  /// Edges with u < v, ordered lexicographically.
  std::vector<Edge> edges() const;

  /// Adds {i, j} unless it is a self-loop or already present.
  bool add_edge(NodeId i, NodeId j);
  bool remove_edge(NodeId i, NodeId j);

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<NodeId>> adj_;
};

struct LoadReport {
  std::size_t duplicates_dropped = 0;
  std::size_t self_loops_dropped = 0;
  /// original_ids[k] is the token that was remapped to node k.
  std::vector<std::int64_t> original_ids;
};

/// Parses the whitespace-separated edge-list format. Lines starting with '#'
/// or '%' are comments; ids are remapped densely in first-appearance order.
Graph load_edge_list(std::istream& in, LoadReport* report = nullptr);
Graph load_edge_list_file(const std::string& path, LoadReport* report = nullptr);
void save_edge_list(const Graph& g, std::ostream& out);

/// Dense hop-distance matrix with 16-bit entries.
class DistanceMatrix {
 public:
  static constexpr std::uint16_t kUnreachable = 0xFFFF;
  static constexpr std::size_t kMaxNodes = 20000;

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  std::uint16_t operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::uint16_t& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  bool reachable(std::size_t i, std::size_t j) const { return (*this)(i, j) != kUnreachable; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint16_t> data_;
};

/// All-pairs hop distances from n breadth-first searches. Rows are filled in
/// parallel when threads > 1; the result does not depend on the thread count.
DistanceMatrix bfs_apsp(const Graph& g, unsigned threads = 1);

struct TriangleCounts {
  std::vector<Edge> edges;
  std::vector<std::int64_t> per_edge;  // aligned with edges
  std::vector<std::int64_t> per_node;  // each triangle counted once per corner
};

TriangleCounts triangle_counts(const Graph& g);

/// gamma-augmented Forman curvature on edges and its degree average on nodes.
struct FormanSignal {
  double gamma = 1.0;
  std::vector<Edge> edges;
  std::vector<double> edge_values;
  std::vector<std::int64_t> triangle_edge_counts;
  std::vector<double> node_values;
  std::vector<std::int64_t> triangle_node_counts;
  /// Extremes over non-isolated nodes; both 0 when every node is isolated.
  double min_node = 0.0;
  double max_node = 0.0;
};

FormanSignal forman(const Graph& g, double gamma);

/// Node Forman value of i computed from degrees and triangle counts only.
double forman_node_value(const Graph& g, NodeId i, double gamma);

/// 1/2 sum over edges of (F_i/sqrt(d_i) - F_j/sqrt(d_j))^2.
double forman_dirichlet_energy(const Graph& g, const FormanSignal& f);

// Small synthetic graphs used by tests and the CLI.
Graph path_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph star_graph(std::size_t leaves);
/// A cycle of length cycle_len with a full binary tree of the given depth
/// hanging off node 0.
Graph cycle_tree_graph(std::size_t cycle_len, std::size_t tree_depth);

}  // namespace hetemb
