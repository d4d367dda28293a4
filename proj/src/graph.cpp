#include "gmcr/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

namespace gmcr {

ConsensusGraph::ConsensusGraph(std::size_t n) : ConsensusGraph(n, {}) {}

ConsensusGraph::ConsensusGraph(std::size_t n, std::vector<std::size_t> node_ids)
    : n_(n), words_((n + kWordBits - 1) / kWordBits), bits_(n * words_, 0), node_ids_(std::move(node_ids)) {
  if (node_ids_.empty()) {
    node_ids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) node_ids_[i] = i;
  }
  if (node_ids_.size() != n) throw InvalidInput("ConsensusGraph: node_ids size mismatch");
}

void ConsensusGraph::add_edge(std::size_t i, std::size_t j) {
  if (i == j) throw InvalidInput("ConsensusGraph: self-loop");
  set_half(i, j);
  set_half(j, i);
}

std::size_t ConsensusGraph::degree(std::size_t i) const {
  std::size_t d = 0;
  for (Word w : row(i)) d += static_cast<std::size_t>(std::popcount(w));
  return d;
}

std::size_t ConsensusGraph::edge_count() const {
  std::size_t total = 0;
  for (Word w : bits_) total += static_cast<std::size_t>(std::popcount(w));
  return total / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> ConsensusGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (adjacent(i, j)) out.emplace_back(i, j);
  return out;
}

ConsensusGraph ConsensusGraph::induced(std::span<const std::size_t> nodes) const {
  std::vector<std::size_t> ids;
  ids.reserve(nodes.size());
  for (std::size_t v : nodes) ids.push_back(node_ids_[v]);
  ConsensusGraph sub(nodes.size(), std::move(ids));
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (adjacent(nodes[a], nodes[b])) sub.add_edge(a, b);
  return sub;
}

bool ConsensusGraph::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (adjacent(i, i)) return false;
    for (std::size_t j = i + 1; j < n_; ++j)
      if (adjacent(i, j) != adjacent(j, i)) return false;
  }
  return true;
}

ConsensusGraph ConsensusGraph::mirror_upper(const ConsensusGraph& upper) {
  ConsensusGraph g(upper.n_, upper.node_ids_);
  const auto n = static_cast<std::ptrdiff_t>(upper.n_);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t jj = 0; jj < n; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    for (std::size_t w = 0; w < g.words_; ++w) g.bits_[j * g.words_ + w] = upper.bits_[j * g.words_ + w];
    for (std::size_t i = 0; i < j; ++i)
      if (upper.adjacent(i, j)) g.set_half(j, i);
  }
  return g;
}

// Batagelj-Zaversnik bucket peeling.
// Bucket queue keyed by live degree. Removing a vertex lowers neighbour
// degrees by one, so the minimum can only step down by one per removal and
// the scan pointer moves back at most one bucket each time.
DegeneracyOrder degeneracy_order(const ConsensusGraph& g) {
  const std::size_t n = g.size();
  DegeneracyOrder out;
  out.core_number.assign(n, 0);
  if (n == 0) return out;

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> deg(n), head, next(n, kNone), prev(n, kNone);
  std::size_t max_deg = 0;
  for (std::size_t v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    max_deg = std::max(max_deg, deg[v]);
  }
  head.assign(max_deg + 1, kNone);
  auto unlink = [&](std::size_t v) {
    if (prev[v] != kNone) next[prev[v]] = next[v];
    else head[deg[v]] = next[v];
    if (next[v] != kNone) prev[next[v]] = prev[v];
  };
  auto push = [&](std::size_t v) {
    prev[v] = kNone;
    next[v] = head[deg[v]];
    if (next[v] != kNone) prev[next[v]] = v;
    head[deg[v]] = v;
  };
  // Pushing in reverse keeps the lowest index at the head of each bucket.
  for (std::size_t v = n; v-- > 0;) push(v);

  std::vector<char> removed(n, 0);
  out.order.reserve(n);
  std::size_t cur = 0, level = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (head[cur] == kNone) ++cur;
    const std::size_t v = head[cur];
    unlink(v);
    removed[v] = 1;
    level = std::max(level, deg[v]);
    out.core_number[v] = level;
    out.order.push_back(v);
    const auto row = g.row(v);
    for (std::size_t w = 0; w < row.size(); ++w) {
      ConsensusGraph::Word bits = row[w];
      while (bits) {
        const std::size_t u = w * ConsensusGraph::kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        if (removed[u]) continue;
        unlink(u);
        --deg[u];
        push(u);
      }
    }
    if (cur > 0) --cur;
  }
  out.degeneracy = level;
  return out;
}

ConsensusGraph k_core_reduce(const ConsensusGraph& g, std::size_t k) {
  const auto dec = degeneracy_order(g);
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (dec.core_number[v] >= k) keep.push_back(v);
  return g.induced(keep);
}

bool is_clique(const ConsensusGraph& g, std::span<const std::size_t> nodes) {
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (nodes[a] == nodes[b] || !g.adjacent(nodes[a], nodes[b])) return false;
  return true;
}

GraphStats graph_stats(const ConsensusGraph& g) {
  GraphStats s;
  s.nodes = g.size();
  s.edges = g.edge_count();
  if (s.nodes >= 2)
    s.density = 2.0 * static_cast<double>(s.edges) / (static_cast<double>(s.nodes) * static_cast<double>(s.nodes - 1));
  if (s.nodes > 0) s.mean_degree = 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes);
  s.degeneracy = degeneracy_order(g).degeneracy;
  return s;
}

ConsensusGraph consistency_graph(std::span<const Correspondence> corrs, double s_hat,
                                 const InlierThreshold& c) {
  if (corrs.size() < 2) throw InvalidInput("consistency_graph: need at least 2 correspondences");
  const double ci = c.inv();
  return build_graph(corrs.size(), [&](std::size_t i, std::size_t j) {
    const double la = (corrs[j].a - corrs[i].a).norm();
    const double lb = (corrs[j].b - corrs[i].b).norm();
    return std::abs(lb - s_hat * la) <= (corrs[i].beta + corrs[j].beta) * ci;
  });
}

void write_edge_list(std::ostream& os, const ConsensusGraph& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g.adjacent(i, j)) os << i << ' ' << j << '\n';
}

}  // namespace gmcr
