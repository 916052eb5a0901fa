#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "chab/coset_table.hpp"
#include "chab/error.hpp"
#include "chab/word.hpp"

namespace chab {

/// Folded Stallings core graph of a finitely generated subgroup of a free
/// group. Vertex 0 is the basepoint; per generator g there is at most one
/// outgoing and one incoming g-edge per vertex, and a word lies in the
/// subgroup exactly when it labels a closed basepoint path (inverse letters
/// read against edge direction).
class CoreGraph {
 public:
  CoreGraph() = default;

  CoreGraph(PresentationPtr pres, int n, std::vector<std::int32_t> succ,
            std::vector<std::int32_t> pred)
      : pres_(std::move(pres)), n_(n), succ_(std::move(succ)), pred_(std::move(pred)) {}

  Presentation const& presentation() const { return *pres_; }
  PresentationPtr presentation_ptr() const { return pres_; }

  int vertex_count() const { return n_; }
  int rank() const { return static_cast<int>(pres_->rank()); }

  // Target of the g-edge out of v (-1 if absent) / source of the g-edge
  // into v.
  std::int32_t out(int v, int g) const { return succ_[v * rank() + g]; }
  std::int32_t in(int v, int g) const { return pred_[v * rank() + g]; }

  std::vector<std::int32_t> const& succ() const { return succ_; }
  std::vector<std::int32_t> const& pred() const { return pred_; }

  // -1 when the walk leaves the graph.
  int walk(int from, Word const& w) const {
    int v = from;
    for (Letter l : w.letters()) {
      v = l > 0 ? out(v, l - 1) : in(v, -l - 1);
      if (v < 0) return -1;
    }
    return v;
  }

  bool complete() const {
    for (auto e : succ_)
      if (e < 0) return false;
    for (auto e : pred_)
      if (e < 0) return false;
    return true;
  }

  friend bool operator==(CoreGraph const& a, CoreGraph const& b) {
    return *a.pres_ == *b.pres_ && a.n_ == b.n_ && a.succ_ == b.succ_
           && a.pred_ == b.pred_;
  }
  friend bool operator!=(CoreGraph const& a, CoreGraph const& b) { return !(a == b); }
  friend bool operator<(CoreGraph const& a, CoreGraph const& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    if (a.succ_ != b.succ_) return a.succ_ < b.succ_;
    return a.pred_ < b.pred_;
  }

 private:
  PresentationPtr pres_;
  int n_ = 0;
  std::vector<std::int32_t> succ_;
  std::vector<std::int32_t> pred_;
};

namespace detail {

// Mutable labeled graph with fold-as-you-go edge insertion: inserting an
// edge that would violate determinism merges the clashing endpoints instead,
// exactly as in coset-table coincidence handling.
class GraphBuilder {
 public:
  explicit GraphBuilder(int rank) : m_(rank) { new_vertex(); }

  explicit GraphBuilder(CoreGraph const& g) : m_(g.rank()) {
    n_ = g.vertex_count();
    succ_ = g.succ();
    pred_ = g.pred();
    rep_.resize(n_);
    for (int i = 0; i < n_; ++i) rep_[i] = i;
  }

  int new_vertex() {
    succ_.resize(succ_.size() + m_, -1);
    pred_.resize(pred_.size() + m_, -1);
    rep_.push_back(n_);
    return n_++;
  }

  int rep(int v) {
    while (rep_[v] != v) v = rep_[v] = rep_[rep_[v]];
    return v;
  }

  std::int32_t& out(int v, int g) { return succ_[v * m_ + g]; }
  std::int32_t& in(int v, int g) { return pred_[v * m_ + g]; }

  void add_letter_edge(int from, Letter l, int to) {
    if (l > 0)
      add_edge(from, l - 1, to);
    else
      add_edge(to, -l - 1, from);
  }

  void add_edge(int u, int g, int v) {
    pending_.emplace_back(u, g, v);
    drain();
  }

  // Walks w from v along existing edges; stops early at the first missing
  // edge. Returns (vertex reached, letters consumed).
  std::pair<int, std::size_t> partial_walk(int v, Word const& w) {
    std::size_t i = 0;
    for (; i < w.size(); ++i) {
      Letter l = w.letters()[i];
      int next = l > 0 ? out(rep(v), l - 1) : in(rep(v), -l - 1);
      if (next < 0) break;
      v = next;
    }
    return {rep(v), i};
  }

  // Removes non-basepoint vertices of degree <= 1 until none remain.
  void prune_hanging_trees(int base) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int v = 0; v < n_; ++v) {
        if (rep(v) != v || v == rep(base)) continue;
        int deg = 0;
        for (int g = 0; g < m_; ++g) deg += (out(v, g) >= 0) + (in(v, g) >= 0);
        if (deg > 1) continue;
        for (int g = 0; g < m_; ++g) {
          if (int t = out(v, g); t >= 0) {
            in(t, g) = -1;
            out(v, g) = -1;
          }
          if (int s = in(v, g); s >= 0) {
            out(s, g) = -1;
            in(v, g) = -1;
          }
        }
        rep_[v] = rep(base);  // retire; relabeling drops it
        dead_.push_back(v);
        changed = true;
      }
    }
  }

  // Canonical folded graph: live vertices renumbered by BFS from the
  // basepoint, visiting out- then in-edges per generator in order.
  CoreGraph canonical(PresentationPtr pres, int base) {
    base = rep(base);
    std::vector<int> newlabel(n_, -1);
    std::vector<int> order{base};
    newlabel[base] = 0;
    for (std::size_t q = 0; q < order.size(); ++q) {
      int v = order[q];
      for (int g = 0; g < m_; ++g)
        for (int t : {static_cast<int>(out(v, g)), static_cast<int>(in(v, g))})
          if (t >= 0 && newlabel[t] < 0) {
            newlabel[t] = static_cast<int>(order.size());
            order.push_back(t);
          }
    }
    int n = static_cast<int>(order.size());
    std::vector<std::int32_t> succ(n * m_, -1), pred(n * m_, -1);
    for (int v : order)
      for (int g = 0; g < m_; ++g) {
        if (out(v, g) >= 0) succ[newlabel[v] * m_ + g] = newlabel[out(v, g)];
        if (in(v, g) >= 0) pred[newlabel[v] * m_ + g] = newlabel[in(v, g)];
      }
    return CoreGraph(std::move(pres), n, std::move(succ), std::move(pred));
  }

  int size() const { return n_; }
  int live_count() {
    int c = 0;
    for (int v = 0; v < n_; ++v) c += rep(v) == v;
    return c;
  }

 private:
  void drain() {
    while (!pending_.empty() || !dead_.empty()) {
      if (!dead_.empty()) {
        int e = dead_.front();
        dead_.pop_front();
        for (int g = 0; g < m_; ++g) {
          if (int f = out(e, g); f >= 0) {
            out(e, g) = -1;
            if (in(f, g) == e) in(f, g) = -1;
            pending_.emplace_back(rep(e), g, rep(f));
          }
          if (int s = in(e, g); s >= 0) {
            in(e, g) = -1;
            if (out(s, g) == e) out(s, g) = -1;
            pending_.emplace_back(rep(s), g, rep(e));
          }
        }
        continue;
      }
      auto [u, g, v] = pending_.front();
      pending_.pop_front();
      u = rep(u);
      v = rep(v);
      if (int w = out(u, g); w != -1) {
        merge(v, w);
      } else if (int s = in(v, g); s != -1) {
        if (rep(s) == u) {
          // the same edge, recorded on v's side against a retired vertex:
          // repoint it instead of merging (which would spin)
          in(v, g) = u;
          out(u, g) = v;
        } else {
          merge(u, s);
          pending_.emplace_back(rep(u), g, v);
        }
      } else {
        out(u, g) = v;
        in(v, g) = u;
      }
    }
  }

  void merge(int a, int b) {
    a = rep(a);
    b = rep(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    rep_[b] = a;
    dead_.push_back(b);
  }

  int m_;
  int n_ = 0;
  std::vector<std::int32_t> succ_, pred_;
  std::vector<int> rep_;
  std::deque<int> dead_;
  std::deque<std::tuple<int, int, int>> pending_;
};

}  // namespace detail

/// Canonical folded core graph of the subgroup generated by the given words.
/// Independent of generator order and of redundant generators; empty input
/// yields the one-vertex graph of the trivial subgroup.
inline CoreGraph fold(PresentationPtr pres, std::vector<Word> const& gens) {
  if (!pres->is_free())
    throw Error("NotFree", "core graphs require a free presentation");
  for (auto const& w : gens) require_word_fits(w, *pres);
  detail::GraphBuilder b(static_cast<int>(pres->rank()));
  for (auto const& w : gens) {
    if (w.empty()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      bool last = i + 1 == w.size();
      int next = last ? 0 : b.new_vertex();
      b.add_letter_edge(cur, w.letters()[i], next);
      cur = b.rep(next);
    }
  }
  b.prune_hanging_trees(0);
  return b.canonical(std::move(pres), 0);
}

inline CoreGraph fold(Presentation const& pres, std::vector<Word> const& gens) {
  return fold(std::make_shared<const Presentation>(pres), gens);
}

/// Membership test: w labels a closed basepoint path.
inline bool contains(CoreGraph const& core, Word const& w) {
  require_word_fits(w, core.presentation());
  return core.walk(0, w) == 0;
}

/// [F : H] when the graph is a complete permutation automaton, nullopt
/// (infinite) otherwise.
inline std::optional<int> subgroup_index(CoreGraph const& core) {
  if (!core.complete()) return std::nullopt;
  return core.vertex_count();
}

/// Finite-index core graphs are coset tables with the same column semantics.
inline CosetTable core_to_table(CoreGraph const& core) {
  if (!core.complete()) throw err::not_finite_index();
  int n = core.vertex_count(), m = core.rank();
  std::vector<std::int32_t> tab(n * 2 * m);
  for (int v = 0; v < n; ++v)
    for (int g = 0; g < m; ++g) {
      tab[v * 2 * m + 2 * g] = core.out(v, g);
      tab[v * 2 * m + 2 * g + 1] = core.in(v, g);
    }
  return canonicalize(CosetTable(core.presentation_ptr(), n, std::move(tab)));
}

inline CoreGraph table_to_core(CosetTable const& t) {
  if (!t.presentation().is_free())
    throw Error("NotFree", "core graphs require a free presentation");
  int n = t.index(), m = static_cast<int>(t.presentation().rank());
  std::vector<std::int32_t> succ(n * m), pred(n * m);
  for (int v = 0; v < n; ++v)
    for (int g = 0; g < m; ++g) {
      succ[v * m + g] = t.entry(v, 2 * g);
      pred[v * m + g] = t.entry(v, 2 * g + 1);
    }
  detail::GraphBuilder b(
      CoreGraph(t.presentation_ptr(), n, std::move(succ), std::move(pred)));
  return b.canonical(t.presentation_ptr(), 0);
}

/// Hall's separation, constructively: attach g's path to the core, then
/// complete every partial generator injection to a permutation by pairing
/// unsaturated sources and targets in BFS vertex order. The result is a
/// finite-index subgroup containing H with g outside it.
inline CoreGraph hall_separate(CoreGraph const& core, Word const& g) {
  require_word_fits(g, core.presentation());
  if (contains(core, g)) throw err::separation_impossible();

  detail::GraphBuilder attach(core);
  auto [v, consumed] = attach.partial_walk(0, g);
  for (std::size_t i = consumed; i < g.size(); ++i) {
    int next = attach.new_vertex();
    attach.add_letter_edge(v, g.letters()[i], next);
    v = attach.rep(next);
  }
  // The endpoint of g's path is a non-basepoint vertex; completion never
  // moves existing edges, so H stays inside and g stays outside.
  CoreGraph partial = attach.canonical(core.presentation_ptr(), 0);

  int n = partial.vertex_count(), m = partial.rank();
  std::vector<std::int32_t> succ(partial.succ()), pred(partial.pred());
  for (int gidx = 0; gidx < m; ++gidx) {
    std::vector<int> sources, targets;
    for (int u = 0; u < n; ++u) {
      if (succ[u * m + gidx] < 0) sources.push_back(u);
      if (pred[u * m + gidx] < 0) targets.push_back(u);
    }
    for (std::size_t i = 0; i < sources.size(); ++i) {
      succ[sources[i] * m + gidx] = targets[i];
      pred[targets[i] * m + gidx] = sources[i];
    }
  }
  detail::GraphBuilder complete(
      CoreGraph(partial.presentation_ptr(), n, std::move(succ), std::move(pred)));
  return complete.canonical(partial.presentation_ptr(), 0);
}

/// Core graph of g H g^-1: graft a path spelling g from a fresh basepoint to
/// the old one, fold, prune, renumber.
inline CoreGraph conjugate_core(CoreGraph const& core, Word const& g) {
  require_word_fits(g, core.presentation());
  if (g.empty()) return core;
  detail::GraphBuilder b(core);
  int base = b.new_vertex();
  int cur = base;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool last = i + 1 == g.size();
    int next = last ? 0 : b.new_vertex();
    b.add_letter_edge(cur, g.letters()[i], next);
    cur = b.rep(next);
  }
  b.prune_hanging_trees(base);
  return b.canonical(core.presentation_ptr(), base);
}

}  // namespace chab
