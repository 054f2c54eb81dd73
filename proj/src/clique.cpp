#include "hetemb/clique.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

namespace hetemb {

namespace {

using Word = std::uint64_t;

struct Bitset {
  std::vector<Word> w;
  explicit Bitset(std::size_t words = 0) : w(words, 0) {}
  void set(std::size_t i) { w[i >> 6] |= Word{1} << (i & 63); }
  void reset(std::size_t i) { w[i >> 6] &= ~(Word{1} << (i & 63)); }
  bool any() const {
    return std::any_of(w.begin(), w.end(), [](Word x) { return x != 0; });
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (Word x : w) c += static_cast<std::size_t>(std::popcount(x));
    return c;
  }
};

std::size_t and_count(const Bitset& a, const Bitset& b) {
  std::size_t c = 0;
  for (std::size_t k = 0; k < a.w.size(); ++k) c += static_cast<std::size_t>(std::popcount(a.w[k] & b.w[k]));
  return c;
}

class Searcher {
 public:
  Searcher(const Graph& g, std::chrono::milliseconds budget)
      : n_(g.num_nodes()), words_((n_ + 63) / 64), adj_(n_, Bitset(words_)),
        deadline_(std::chrono::steady_clock::now() + budget) {
    for (std::size_t i = 0; i < n_; ++i)
      for (NodeId j : g.neighbors(static_cast<NodeId>(i))) adj_[i].set(static_cast<std::size_t>(j));
  }

  void seed(const std::vector<NodeId>& clique) {
    best_ = clique;
  }

  bool run() {
    Bitset p(words_), x(words_);
    for (std::size_t i = 0; i < n_; ++i) p.set(i);
    std::vector<NodeId> r;
    expand(r, p, x);
    return !timed_out_;
  }

  const std::vector<NodeId>& best() const { return best_; }

 private:
  void expand(std::vector<NodeId>& r, Bitset& p, Bitset& x) {
    if (timed_out_) return;
    if ((++calls_ & 1023) == 0 && std::chrono::steady_clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    if (!p.any()) {
      if (!x.any() && r.size() > best_.size()) best_ = r;
      return;
    }
    if (r.size() + p.count() <= best_.size()) return;

    // Pivot maximizing |P ∩ N(u)| over u in P ∪ X.
    std::size_t pivot = 0, pivot_score = 0;
    bool have = false;
    for (std::size_t k = 0; k < words_; ++k) {
      Word m = p.w[k] | x.w[k];
      while (m) {
        const std::size_t u = k * 64 + static_cast<std::size_t>(std::countr_zero(m));
        m &= m - 1;
        const std::size_t score = and_count(p, adj_[u]);
        if (!have || score > pivot_score) {
          pivot = u;
          pivot_score = score;
          have = true;
        }
      }
    }

    Bitset candidates(words_);
    for (std::size_t k = 0; k < words_; ++k) candidates.w[k] = p.w[k] & ~adj_[pivot].w[k];
    for (std::size_t k = 0; k < words_; ++k) {
      Word m = candidates.w[k];
      while (m) {
        const std::size_t v = k * 64 + static_cast<std::size_t>(std::countr_zero(m));
        m &= m - 1;
        Bitset np(words_), nx(words_);
        for (std::size_t t = 0; t < words_; ++t) {
          np.w[t] = p.w[t] & adj_[v].w[t];
          nx.w[t] = x.w[t] & adj_[v].w[t];
        }
        r.push_back(static_cast<NodeId>(v));
        expand(r, np, nx);
        r.pop_back();
        if (timed_out_) return;
        p.reset(v);
        x.set(v);
        if (r.size() + p.count() <= best_.size()) return;
      }
    }
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<Bitset> adj_;
  std::vector<NodeId> best_;
  std::chrono::steady_clock::time_point deadline_;
  std::size_t calls_ = 0;
  bool timed_out_ = false;
};

}  // namespace

CliqueResult greedy_clique(const Graph& g) {
  CliqueResult best;
  for (std::size_t s = 0; s < g.num_nodes(); ++s) {
    std::vector<NodeId> clique{static_cast<NodeId>(s)};
    std::vector<NodeId> cand = g.neighbors(static_cast<NodeId>(s));
    while (!cand.empty()) {
      auto pick = *std::max_element(cand.begin(), cand.end(), [&](NodeId a, NodeId b) {
        return g.degree(a) < g.degree(b) || (g.degree(a) == g.degree(b) && a > b);
      });
      clique.push_back(pick);
      std::vector<NodeId> next;
      const auto& nb = g.neighbors(pick);
      std::set_intersection(cand.begin(), cand.end(), nb.begin(), nb.end(), std::back_inserter(next));
      cand = std::move(next);
    }
    if (clique.size() > best.members.size()) best.members = clique;
  }
  std::sort(best.members.begin(), best.members.end());
  return best;
}

CliqueResult max_clique(const Graph& g, std::chrono::milliseconds budget) {
  CliqueResult greedy = greedy_clique(g);
  if (g.num_nodes() == 0) return greedy;
  Searcher s(g, budget);
  s.seed(greedy.members);
  CliqueResult out;
  out.exact = s.run();
  out.members = s.best();
  std::sort(out.members.begin(), out.members.end());
  return out;
}

}  // namespace hetemb
