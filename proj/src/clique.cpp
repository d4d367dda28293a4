#include "gmcr/graph.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>

namespace gmcr {
namespace {

using Word = ConsensusGraph::Word;
using Bits = std::vector<Word>;
constexpr std::size_t kBits = ConsensusGraph::kWordBits;
using Clock = std::chrono::steady_clock;

inline bool test(const Bits& b, std::size_t v) { return (b[v / kBits] >> (v % kBits)) & 1u; }
inline void set(Bits& b, std::size_t v) { b[v / kBits] |= Word{1} << (v % kBits); }
inline void clear(Bits& b, std::size_t v) { b[v / kBits] &= ~(Word{1} << (v % kBits)); }

std::size_t count(std::span<const Word> b) {
  std::size_t c = 0;
  for (Word w : b) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool empty(const Bits& b) {
  return std::all_of(b.begin(), b.end(), [](Word w) { return w == 0; });
}

std::size_t lowest(const Bits& b) {
  for (std::size_t w = 0; w < b.size(); ++w)
    if (b[w]) return w * kBits + static_cast<std::size_t>(std::countr_zero(b[w]));
  return b.size() * kBits;
}

Bits intersect(const Bits& p, std::span<const Word> row) {
  Bits out(p.size());
  for (std::size_t w = 0; w < p.size(); ++w) out[w] = p[w] & row[w];
  return out;
}

// Sequential greedy colouring in increasing bit order. `order` lists the
// vertices grouped by colour class, `colour` the class number (1-based) of
// each entry; colours are non-decreasing along `order`.
void colour_sort(const ConsensusGraph& g, const Bits& p, std::vector<std::size_t>& order,
                 std::vector<std::size_t>& colour) {
  order.clear();
  colour.clear();
  Bits q = p;
  Bits u(p.size());
  std::size_t k = 0;
  while (!empty(q)) {
    ++k;
    u = q;
    for (std::size_t w = 0; w < u.size(); ++w) {
      while (u[w]) {
        const std::size_t v = w * kBits + static_cast<std::size_t>(std::countr_zero(u[w]));
        u[w] &= u[w] - 1;
        clear(q, v);
        const auto row = g.row(v);
        for (std::size_t x = w; x < u.size(); ++x) u[x] &= ~row[x];
        order.push_back(v);
        colour.push_back(k);
      }
    }
  }
}

// Branch and bound over a relabelled graph whose bit order is the
// colouring order. One instance per thread.
class Search {
 public:
  Search(const ConsensusGraph& h, Clock::time_point deadline, bool has_deadline,
         std::atomic<bool>& aborted)
      : h_(h), deadline_(deadline), has_deadline_(has_deadline), aborted_(aborted) {}

  // Raise `best` if a clique larger than it exists in P extending R.
  void expand_max(Bits& p, std::vector<std::size_t>& r, std::atomic<std::size_t>& best,
                  std::mutex& mu, std::vector<std::size_t>& best_nodes) {
    if (out_of_time()) return;
    std::vector<std::size_t> order, colour;
    colour_sort(h_, p, order, colour);
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (r.size() + colour[idx] <= best.load(std::memory_order_relaxed)) return;
      const std::size_t v = order[idx];
      r.push_back(v);
      Bits np = intersect(p, h_.row(v));
      if (empty(np)) {
        std::lock_guard lock(mu);
        if (r.size() > best.load()) {
          best.store(r.size());
          best_nodes = r;
        }
      } else {
        expand_max(np, r, best, mu, best_nodes);
      }
      r.pop_back();
      clear(p, v);
      if (aborted_.load(std::memory_order_relaxed)) return;
    }
  }

  // True if P holds a clique of size >= need.
  bool find(Bits& p, std::size_t need) {
    if (need == 0) return true;
    if (out_of_time()) return false;
    if (count(p) < need) return false;
    if (greedy_size(p) >= need) return true;
    std::vector<std::size_t> order, colour;
    colour_sort(h_, p, order, colour);
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (colour[idx] < need) return false;
      const std::size_t v = order[idx];
      Bits np = intersect(p, h_.row(v));
      if (find(np, need - 1)) return true;
      clear(p, v);
      if (aborted_.load(std::memory_order_relaxed)) return false;
    }
    return false;
  }

 private:
  // Size of a greedy clique in P taking the lowest label each step; a
  // witness that often settles `find` without colouring.
  std::size_t greedy_size(const Bits& p) const {
    Bits q = p;
    std::size_t k = 0;
    while (!empty(q)) {
      const std::size_t u = lowest(q);
      ++k;
      const auto row = h_.row(u);
      for (std::size_t w = 0; w < q.size(); ++w) q[w] &= row[w];
    }
    return k;
  }

  bool out_of_time() {
    if (!has_deadline_) return false;
    if (aborted_.load(std::memory_order_relaxed)) return true;
    if ((++ticks_ & 0xFF) == 0 && Clock::now() > deadline_) aborted_.store(true);
    return aborted_.load(std::memory_order_relaxed);
  }

  const ConsensusGraph& h_;
  Clock::time_point deadline_;
  bool has_deadline_;
  std::atomic<bool>& aborted_;
  std::size_t ticks_ = 0;
};

// Greedy clique grown from v, always taking the lowest-labelled candidate.
std::vector<std::size_t> greedy_from(const ConsensusGraph& h, std::size_t v) {
  std::vector<std::size_t> r{v};
  Bits p(h.row(v).begin(), h.row(v).end());
  while (!empty(p)) {
    const std::size_t u = lowest(p);
    r.push_back(u);
    const auto row = h.row(u);
    for (std::size_t w = 0; w < p.size(); ++w) p[w] &= row[w];
  }
  return r;
}

}  // namespace

std::size_t colouring_bound(const ConsensusGraph& g, std::span<const Word> cand) {
  Bits p(cand.begin(), cand.end());
  std::vector<std::size_t> order, colour;
  colour_sort(g, p, order, colour);
  return colour.empty() ? 0 : colour.back();
}

Clique max_clique(const ConsensusGraph& g, const CliqueOptions& opts) {
  const std::size_t n = g.size();
  Clique out;
  if (n == 0) return out;

  const bool has_deadline = opts.time_budget.has_value();
  const auto deadline = Clock::now() + opts.time_budget.value_or(std::chrono::milliseconds(0));
  std::atomic<bool> aborted{false};

  // Relabel so label 0 is the last vertex peeled (densest core). Lower
  // labels are then the "later" neighbours of the degeneracy order.
  const auto dec = degeneracy_order(g);
  std::vector<std::size_t> to_orig(n), to_int(n);
  for (std::size_t p = 0; p < n; ++p) {
    to_orig[p] = dec.order[n - 1 - p];
    to_int[to_orig[p]] = p;
  }
  ConsensusGraph h(n);
  {
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t a = 0; a < nn; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const auto row = g.row(to_orig[ua]);
      for (std::size_t w = 0; w < row.size(); ++w) {
        Word bits = row[w];
        while (bits) {
          const std::size_t v = w * kBits + static_cast<std::size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          h.set_half(ua, to_int[v]);
        }
      }
    }
  }
  std::vector<std::size_t> core(n);
  for (std::size_t p = 0; p < n; ++p) core[p] = dec.core_number[to_orig[p]];

  // Initial incumbent from greedy growth at the densest vertices.
  std::vector<std::size_t> best_nodes{0};
  for (std::size_t v = 0; v < std::min<std::size_t>(n, 64); ++v) {
    auto r = greedy_from(h, v);
    if (r.size() > best_nodes.size()) best_nodes = std::move(r);
  }
  std::atomic<std::size_t> best{best_nodes.size()};
  std::mutex mu;

  // Phase 1: exact clique number. Root v only looks at labels below v.
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    Search search(h, deadline, has_deadline, aborted);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t vv = 0; vv < nn; ++vv) {
      const auto v = static_cast<std::size_t>(vv);
      if (aborted.load(std::memory_order_relaxed)) continue;
      const std::size_t lb = best.load();
      if (core[v] + 1 <= lb) continue;
      Bits p(h.words(), 0);
      const auto row = h.row(v);
      for (std::size_t u = 0; u < v; ++u)
        if (((row[u / kBits] >> (u % kBits)) & 1u) && core[u] >= lb) set(p, u);
      if (count(p) + 1 <= lb) continue;
      std::vector<std::size_t> r{v};
      search.expand_max(p, r, best, mu, best_nodes);
    }
  }

  const std::size_t omega = best.load();
  auto finish = [&](std::vector<std::size_t> internal, bool exact) {
    out.nodes.clear();
    for (std::size_t v : internal) out.nodes.push_back(to_orig[v]);
    std::sort(out.nodes.begin(), out.nodes.end());
    out.exact = exact;
    return out;
  };
  if (aborted.load()) return finish(best_nodes, false);

  // Phase 2: lexicographically smallest clique of size omega. Walk the
  // original ids in ascending order and keep v whenever the remaining
  // candidates above v still admit a clique of the required size.
  Search search(h, deadline, has_deadline, aborted);
  std::vector<std::size_t> chosen;
  Bits cand(h.words(), 0);
  for (std::size_t p = 0; p < n; ++p)
    if (core[p] + 1 >= omega) set(cand, p);
  for (std::size_t orig = 0; orig < n && chosen.size() < omega; ++orig) {
    const std::size_t v = to_int[orig];
    if (!test(cand, v)) continue;
    clear(cand, v);
    Bits next = intersect(cand, h.row(v));
    Bits probe = next;
    if (search.find(probe, omega - chosen.size() - 1)) {
      chosen.push_back(v);
      cand = std::move(next);
    }
    if (aborted.load()) return finish(best_nodes, false);
  }
  if (chosen.size() != omega) return finish(best_nodes, false);
  return finish(chosen, true);
}

namespace {

void enumerate(const ConsensusGraph& g, std::vector<std::size_t>& r, std::vector<std::size_t>& cand,
               std::vector<std::size_t>& best) {
  if (r.size() > best.size()) best = r;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    const std::size_t v = cand[k];
    std::vector<std::size_t> next;
    for (std::size_t m = k + 1; m < cand.size(); ++m)
      if (g.adjacent(v, cand[m])) next.push_back(cand[m]);
    r.push_back(v);
    enumerate(g, r, next, best);
    r.pop_back();
  }
}

}  // namespace

Clique max_clique_bruteforce(const ConsensusGraph& g) {
  if (g.size() > 25) throw InvalidInput("max_clique_bruteforce: graph larger than 25 nodes");
  Clique out;
  std::vector<std::size_t> r, cand(g.size()), best;
  for (std::size_t v = 0; v < g.size(); ++v) cand[v] = v;
  enumerate(g, r, cand, best);
  out.nodes = best;
  return out;
}

}  // namespace gmcr
