#include "hetemb/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace hetemb {

Graph Graph::from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Graph g(n);
  for (auto [i, j] : edges) g.add_edge(i, j);
  return g;
}

std::size_t Graph::num_edges() const {
  std::size_t total = 0;
  for (const auto& nb : adj_) total += nb.size();
  return total / 2;
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  const auto& nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t i = 0; i < adj_.size(); ++i) {
    for (NodeId j : adj_[i]) {
      if (static_cast<NodeId>(i) < j) out.push_back({static_cast<NodeId>(i), j});
    }
  }
  return out;
}

bool Graph::add_edge(NodeId i, NodeId j) {
  if (i == j) return false;
  auto& a = adj_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(a.begin(), a.end(), j);
  if (it != a.end() && *it == j) return false;
  a.insert(it, j);
  auto& b = adj_[static_cast<std::size_t>(j)];
  b.insert(std::lower_bound(b.begin(), b.end(), i), i);
  return true;
}

bool Graph::remove_edge(NodeId i, NodeId j) {
  auto& a = adj_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(a.begin(), a.end(), j);
  if (it == a.end() || *it != j) return false;
  a.erase(it);
  auto& b = adj_[static_cast<std::size_t>(j)];
  b.erase(std::lower_bound(b.begin(), b.end(), i));
  return true;
}

Graph load_edge_list(std::istream& in, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  rep = LoadReport{};

  std::unordered_map<std::int64_t, NodeId> remap;
  std::vector<std::pair<NodeId, NodeId>> raw;
  auto intern = [&](std::int64_t id) {
    auto [it, inserted] = remap.try_emplace(id, static_cast<NodeId>(remap.size()));
    if (inserted) rep.original_ids.push_back(id);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == '%') continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!(ss >> a >> b)) throw ParseError(lineno, "expected two node ids");
    std::int64_t ia = 0, ib = 0;
    try {
      std::size_t pa = 0, pb = 0;
      ia = std::stoll(a, &pa);
      ib = std::stoll(b, &pb);
      if (pa != a.size() || pb != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(lineno, "node ids must be integers");
    }
    // Extra columns (weights, timestamps) are ignored.
    const NodeId u = intern(ia);
    const NodeId v = intern(ib);
    raw.emplace_back(u, v);
  }

  Graph g(remap.size());
  for (auto [i, j] : raw) {
    if (i == j) {
      ++rep.self_loops_dropped;
    } else if (!g.add_edge(i, j)) {
      ++rep.duplicates_dropped;
    }
  }
  return g;
}

Graph load_edge_list_file(const std::string& path, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load_edge_list(in, report);
}

void save_edge_list(const Graph& g, std::ostream& out) {
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

DistanceMatrix::DistanceMatrix(std::size_t n) : n_(n), data_(n * n, kUnreachable) {
  if (n > kMaxNodes) {
    throw std::length_error("distance matrix limited to " + std::to_string(kMaxNodes) + " nodes");
  }
}

namespace {

void bfs_row(const Graph& g, std::size_t src, DistanceMatrix& d, std::vector<NodeId>& queue) {
  queue.clear();
  d(src, src) = 0;
  queue.push_back(static_cast<NodeId>(src));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    std::uint16_t du = d(src, static_cast<std::size_t>(u));
    for (NodeId v : g.neighbors(u)) {
      auto& dv = d(src, static_cast<std::size_t>(v));
      if (dv == DistanceMatrix::kUnreachable) {
        dv = static_cast<std::uint16_t>(du + 1);
        queue.push_back(v);
      }
    }
  }
}

}  // namespace

DistanceMatrix bfs_apsp(const Graph& g, unsigned threads) {
  const std::size_t n = g.num_nodes();
  DistanceMatrix d(n);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    std::vector<NodeId> queue;
    for (std::size_t s = 0; s < n; ++s) bfs_row(g, s, d, queue);
    return d;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      std::vector<NodeId> queue;
      for (std::size_t s = t; s < n; s += threads) bfs_row(g, s, d, queue);
    });
  }
  for (auto& th : pool) th.join();
  return d;
}

namespace {

std::int64_t common_neighbors(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::int64_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace

TriangleCounts triangle_counts(const Graph& g) {
  TriangleCounts t;
  t.edges = g.edges();
  t.per_edge.resize(t.edges.size());
  t.per_node.assign(g.num_nodes(), 0);
  for (std::size_t k = 0; k < t.edges.size(); ++k) {
    const Edge& e = t.edges[k];
    t.per_edge[k] = common_neighbors(g.neighbors(e.u), g.neighbors(e.v));
    t.per_node[static_cast<std::size_t>(e.u)] += t.per_edge[k];
    t.per_node[static_cast<std::size_t>(e.v)] += t.per_edge[k];
  }
  for (auto& c : t.per_node) c /= 2;
  return t;
}

FormanSignal forman(const Graph& g, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("forman: gamma must be positive");
  const std::size_t n = g.num_nodes();
  TriangleCounts tri = triangle_counts(g);

  FormanSignal f;
  f.gamma = gamma;
  f.edges = std::move(tri.edges);
  f.triangle_edge_counts = std::move(tri.per_edge);
  f.triangle_node_counts = std::move(tri.per_node);
  f.edge_values.resize(f.edges.size());
  f.node_values.assign(n, 0.0);

  for (std::size_t k = 0; k < f.edges.size(); ++k) {
    const Edge& e = f.edges[k];
    double value = 4.0 - static_cast<double>(g.degree(e.u)) - static_cast<double>(g.degree(e.v)) +
                   3.0 * gamma * static_cast<double>(f.triangle_edge_counts[k]);
    f.edge_values[k] = value;
    f.node_values[static_cast<std::size_t>(e.u)] += value;
    f.node_values[static_cast<std::size_t>(e.v)] += value;
  }

  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t d = g.degree(static_cast<NodeId>(i));
    if (d == 0) continue;
    f.node_values[i] /= static_cast<double>(d);
    if (!any) {
      f.min_node = f.max_node = f.node_values[i];
      any = true;
    } else {
      f.min_node = std::min(f.min_node, f.node_values[i]);
      f.max_node = std::max(f.max_node, f.node_values[i]);
    }
  }
  return f;
}

double forman_node_value(const Graph& g, NodeId i, double gamma) {
  const auto& nb = g.neighbors(i);
  if (nb.empty()) return 0.0;
  const double di = static_cast<double>(nb.size());
  double sum = 0.0;
  for (NodeId j : nb) {
    sum += 4.0 - di - static_cast<double>(g.degree(j)) +
           3.0 * gamma * static_cast<double>(common_neighbors(nb, g.neighbors(j)));
  }
  return sum / di;
}

double forman_dirichlet_energy(const Graph& g, const FormanSignal& f) {
  double energy = 0.0;
  for (const Edge& e : g.edges()) {
    double a = f.node_values[static_cast<std::size_t>(e.u)] /
               std::sqrt(static_cast<double>(g.degree(e.u)));
    double b = f.node_values[static_cast<std::size_t>(e.v)] /
               std::sqrt(static_cast<double>(g.degree(e.v)));
    energy += (a - b) * (a - b);
  }
  return 0.5 * energy;
}

Graph path_graph(std::size_t n) {
  Graph g(n);
  for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
  return g;
}

Graph complete_graph(std::size_t n) {
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return g;
}

Graph cycle_graph(std::size_t n) {
  Graph g = path_graph(n);
  if (n > 2) g.add_edge(static_cast<NodeId>(n - 1), 0);
  return g;
}

Graph star_graph(std::size_t leaves) {
  Graph g(leaves + 1);
  for (std::size_t k = 1; k <= leaves; ++k) g.add_edge(0, static_cast<NodeId>(k));
  return g;
}

Graph cycle_tree_graph(std::size_t cycle_len, std::size_t tree_depth) {
  const std::size_t tree_nodes = (std::size_t{1} << (tree_depth + 1)) - 1;
  // Node 0 is shared: it sits on the cycle and is the tree root.
  Graph g(cycle_len + tree_nodes - 1);
  for (std::size_t i = 0; i < cycle_len; ++i)
    g.add_edge(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % cycle_len));
  auto tree_id = [&](std::size_t k) -> NodeId {
    return k == 0 ? 0 : static_cast<NodeId>(cycle_len + k - 1);
  };
  for (std::size_t k = 1; k < tree_nodes; ++k) g.add_edge(tree_id((k - 1) / 2), tree_id(k));
  return g;
}

}  // namespace hetemb
