#pragma once

#include "gmcr/core.hpp"

#include <bit>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gmcr {

/// Undirected simple graph stored as packed adjacency bit rows.
/// node_ids maps each graph node back to the measurement it represents.
class ConsensusGraph {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  ConsensusGraph() = default;
  explicit ConsensusGraph(std::size_t n);
  ConsensusGraph(std::size_t n, std::vector<std::size_t> node_ids);

  std::size_t size() const { return n_; }
  std::size_t words() const { return words_; }
  const std::vector<std::size_t>& node_ids() const { return node_ids_; }

  bool adjacent(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / kWordBits] >> (j % kWordBits)) & 1u;
  }
  /// Sets both (i, j) and (j, i). i != j.
  void add_edge(std::size_t i, std::size_t j);
  /// Sets only row i; callers building symmetric rows in parallel use this.
  void set_half(std::size_t i, std::size_t j) {
    bits_[i * words_ + j / kWordBits] |= Word{1} << (j % kWordBits);
  }

  std::span<const Word> row(std::size_t i) const { return {bits_.data() + i * words_, words_}; }
  std::size_t degree(std::size_t i) const;
  std::size_t edge_count() const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  /// Subgraph induced by `nodes` (graph-local, any order); node_ids follow.
  ConsensusGraph induced(std::span<const std::size_t> nodes) const;

  bool is_symmetric() const;

  /// Symmetric graph from one whose rows hold only the j > i half.
  static ConsensusGraph mirror_upper(const ConsensusGraph& upper);

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<Word> bits_;
  std::vector<std::size_t> node_ids_;
};

/// Parallel over rows: each unordered pair is evaluated once (i < j) into
/// an upper-triangle graph, which is then mirrored into a fresh graph.
template <class Pred>
ConsensusGraph build_graph(std::size_t count, Pred&& pred) {
  ConsensusGraph upper(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = i + 1; j < n; ++j)
      if (pred(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
        upper.set_half(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return ConsensusGraph::mirror_upper(upper);
}

/// Single-threaded reference for build_graph.
template <class Pred>
ConsensusGraph build_graph_serial(std::size_t count, Pred&& pred) {
  ConsensusGraph g(count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j)
      if (pred(i, j)) g.add_edge(i, j);
  return g;
}

struct DegeneracyOrder {
  std::vector<std::size_t> order;        // removal order, min degree first
  std::vector<std::size_t> core_number;  // per node
  std::size_t degeneracy = 0;
};

DegeneracyOrder degeneracy_order(const ConsensusGraph& g);

/// Maximal subgraph with every degree >= k. node_ids are carried over.
ConsensusGraph k_core_reduce(const ConsensusGraph& g, std::size_t k);

struct Clique {
  std::vector<std::size_t> nodes;  // graph-local, ascending
  bool exact = true;
};

struct CliqueOptions {
  std::optional<std::chrono::milliseconds> time_budget;
};

/// Exact maximum clique by bitset branch and bound (greedy colouring bound,
/// degeneracy-ordered root branching, k-core pruning). Among maximum
/// cliques the lexicographically smallest node set is returned. With a
/// time budget the best clique found so far is returned and `exact` is
/// false if the search was cut short.
Clique max_clique(const ConsensusGraph& g, const CliqueOptions& opts = {});

/// Plain enumeration; n <= 25.
Clique max_clique_bruteforce(const ConsensusGraph& g);

/// Greedy colouring bound on `cand` (bit row of width g.words()): the
/// number of colour classes used. Exposed for tests.
std::size_t colouring_bound(const ConsensusGraph& g, std::span<const ConsensusGraph::Word> cand);

bool is_clique(const ConsensusGraph& g, std::span<const std::size_t> nodes);

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double density = 0.0;
  std::size_t degeneracy = 0;
  double mean_degree = 0.0;
};

GraphStats graph_stats(const ConsensusGraph& g);

/// Nodes are correspondences; (i, j) is an edge iff the TIM length at the
/// given scale agrees within (beta_i + beta_j)/c.
ConsensusGraph consistency_graph(std::span<const Correspondence> corrs, double s_hat,
                                 const InlierThreshold& c);

/// One "u v" line per edge (u < v), 0-indexed graph-local ids.
void write_edge_list(std::ostream& os, const ConsensusGraph& g);

}  // namespace gmcr
