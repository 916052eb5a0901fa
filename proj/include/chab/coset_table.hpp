#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "chab/error.hpp"
#include "chab/word.hpp"

namespace chab {

/// Complete transitive action of a finitely presented group on the cosets of
/// a finite-index subgroup H. Coset 0 is H itself. Columns come in pairs
/// g1, g1^-1, g2, g2^-1, ... and tracing a word left to right through its
/// letters' columns realizes the coset map Hx -> Hxw; a word lies in H
/// exactly when it traces 0 back to 0.
class CosetTable {
 public:
  CosetTable() = default;

  CosetTable(PresentationPtr pres, int n, std::vector<std::int32_t> tab)
      : pres_(std::move(pres)), n_(n), tab_(std::move(tab)) {}

  Presentation const& presentation() const { return *pres_; }
  PresentationPtr presentation_ptr() const { return pres_; }

  int index() const { return n_; }
  int width() const { return 2 * static_cast<int>(pres_->rank()); }

  std::int32_t entry(int coset, int col) const { return tab_[coset * width() + col]; }
  std::vector<std::int32_t> const& raw() const { return tab_; }

  int trace(int from, Word const& w) const {
    int c = from;
    for (Letter l : w.letters()) c = entry(c, column_of(l));
    return c;
  }

  /// Coset reached by tracing w from the basepoint; 0 iff w is in H.
  int coset_of(Word const& w) const {
    require_word_fits(w, *pres_);
    return trace(0, w);
  }

  bool member(Word const& w) const { return coset_of(w) == 0; }

  friend bool operator==(CosetTable const& a, CosetTable const& b) {
    return *a.pres_ == *b.pres_ && a.n_ == b.n_ && a.tab_ == b.tab_;
  }
  friend bool operator!=(CosetTable const& a, CosetTable const& b) { return !(a == b); }

  /// Orders tables by (index, lexicographic table entries) within one group.
  friend bool operator<(CosetTable const& a, CosetTable const& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.tab_ < b.tab_;
  }

 private:
  PresentationPtr pres_;
  int n_ = 0;
  std::vector<std::int32_t> tab_;
};

namespace detail {

// BFS renumbering from `base` visiting columns in stored order. Returns the
// old->new relabeling; every coset must be reachable.
inline std::vector<int> bfs_numbering(std::vector<std::int32_t> const& tab, int n,
                                      int width, int base) {
  std::vector<int> newlabel(n, -1);
  std::vector<int> order;
  order.reserve(n);
  newlabel[base] = 0;
  order.push_back(base);
  for (std::size_t q = 0; q < order.size(); ++q) {
    int c = order[q];
    for (int col = 0; col < width; ++col) {
      int t = tab[c * width + col];
      if (newlabel[t] < 0) {
        newlabel[t] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  }
  if (static_cast<int>(order.size()) != n)
    throw Error("NotTransitive", "coset table is not transitive");
  return newlabel;
}

inline std::vector<std::int32_t> relabel(std::vector<std::int32_t> const& tab, int n,
                                         int width, std::vector<int> const& newlabel) {
  std::vector<std::int32_t> out(tab.size());
  for (int c = 0; c < n; ++c)
    for (int col = 0; col < width; ++col)
      out[newlabel[c] * width + col] = newlabel[tab[c * width + col]];
  return out;
}

}  // namespace detail

/// Canonical form: BFS renumbering from the given basepoint in column order.
/// With base != 0 this is the rebasing map, i.e. the table of the stabilizer
/// of coset `base`.
inline CosetTable canonicalize(CosetTable const& t, int base = 0) {
  auto newlabel = detail::bfs_numbering(t.raw(), t.index(), t.width(), base);
  return CosetTable(t.presentation_ptr(), t.index(),
                    detail::relabel(t.raw(), t.index(), t.width(), newlabel));
}

inline CosetTable rebase(CosetTable const& t, int coset) {
  if (coset < 0 || coset >= t.index())
    throw err::index_out_of_range(coset);
  return canonicalize(t, coset);
}

/// Checks every CosetTable invariant: completeness, mutually inverse
/// generator columns, relator traces, transitivity and BFS canonicity.
/// Returns an empty string when valid, else a description of the defect.
inline std::string validate(CosetTable const& t) {
  int n = t.index(), w = t.width();
  if (n <= 0) return "empty table";
  for (int c = 0; c < n; ++c)
    for (int col = 0; col < w; ++col) {
      int v = t.entry(c, col);
      if (v < 0 || v >= n) return "entry out of range";
    }
  for (int col = 0; col < w; col += 2)
    for (int c = 0; c < n; ++c) {
      if (t.entry(t.entry(c, col), col + 1) != c) return "columns not mutually inverse";
      if (t.entry(t.entry(c, col + 1), col) != c) return "columns not mutually inverse";
    }
  for (auto const& r : t.presentation().relators())
    for (int c = 0; c < n; ++c)
      if (t.trace(c, r) != c) return "relator does not close";
  try {
    auto newlabel = detail::bfs_numbering(t.raw(), n, w, 0);
    for (int c = 0; c < n; ++c)
      if (newlabel[c] != c) return "numbering is not BFS-canonical";
  } catch (Error const&) {
    return "not transitive";
  }
  return "";
}

/// BFS spanning tree data: for each coset its parent, the column used to
/// reach it, and its representative word (trace from 0).
struct CosetTree {
  std::vector<int> parent;
  std::vector<int> parent_col;
  std::vector<Word> rep;
};

inline CosetTree spanning_tree(CosetTable const& t) {
  int n = t.index(), w = t.width();
  CosetTree tree;
  tree.parent.assign(n, -1);
  tree.parent_col.assign(n, -1);
  tree.rep.assign(n, Word());
  std::vector<int> order{0};
  std::vector<bool> seen(n, false);
  seen[0] = true;
  for (std::size_t q = 0; q < order.size(); ++q) {
    int c = order[q];
    for (int col = 0; col < w; ++col) {
      int v = t.entry(c, col);
      if (!seen[v]) {
        seen[v] = true;
        tree.parent[v] = c;
        tree.parent_col[v] = col;
        tree.rep[v] = tree.rep[c] * Word::from_reduced({letter_of_column(col)});
        order.push_back(v);
      }
    }
  }
  return tree;
}

/// Finite generating set of H from the non-tree edges of the Schreier graph:
/// one word rep(u) * g * rep(u.g)^-1 per positive non-tree edge. Every
/// returned word traces 0 to 0.
inline std::vector<Word> schreier_generators(CosetTable const& t) {
  auto tree = spanning_tree(t);
  int n = t.index();
  int m = static_cast<int>(t.presentation().rank());
  std::vector<Word> gens;
  for (int u = 0; u < n; ++u)
    for (int g = 0; g < m; ++g) {
      int v = t.entry(u, 2 * g);
      bool tree_edge = (tree.parent[v] == u && tree.parent_col[v] == 2 * g)
                       || (tree.parent[u] == v && tree.parent_col[u] == 2 * g + 1);
      if (tree_edge) continue;
      Word word = tree.rep[u] * Word::from_reduced({static_cast<Letter>(g + 1)})
                   * tree.rep[v].inverse();
      if (!word.empty()) gens.push_back(word);
    }
  return gens;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Roots merged with the smaller index surviving; returns false if already equal.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

// Minimal block system of the coset action identifying the basepoint with p
// (Atkinson's algorithm). Returned as the class id per coset.
inline std::vector<int> minimal_block_system(CosetTable const& t, int p) {
  int n = t.index(), w = t.width();
  UnionFind uf(n);
  std::vector<std::pair<int, int>> stack;
  if (uf.unite(0, p)) stack.emplace_back(0, p);
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    for (int col = 0; col < w; col += 2) {
      int x = t.entry(a, col), y = t.entry(b, col);
      if (uf.unite(x, y)) stack.emplace_back(x, y);
    }
  }
  std::vector<int> cls(n);
  for (int c = 0; c < n; ++c) cls[c] = uf.find(c);
  return cls;
}

// Transitive closure of two invariant partitions is again invariant, so the
// lattice join needs no action propagation.
inline std::vector<int> join_partitions(std::vector<int> const& a,
                                        std::vector<int> const& b) {
  int n = static_cast<int>(a.size());
  UnionFind uf(n);
  for (int c = 0; c < n; ++c) {
    uf.unite(c, a[c]);
    uf.unite(c, b[c]);
  }
  std::vector<int> cls(n);
  for (int c = 0; c < n; ++c) cls[c] = uf.find(c);
  return cls;
}

// Block of the basepoint, as a sorted coset list. Determines the overgroup.
inline std::vector<int> base_block(std::vector<int> const& cls) {
  std::vector<int> blk;
  for (int c = 0; c < static_cast<int>(cls.size()); ++c)
    if (cls[c] == cls[0]) blk.push_back(c);
  return blk;
}

// Coset table of the overgroup attached to an invariant partition: the
// induced action on blocks, canonically renumbered.
inline CosetTable block_action(CosetTable const& t, std::vector<int> const& cls) {
  int n = t.index(), w = t.width();
  std::vector<int> block_id(n, -1);
  int blocks = 0;
  for (int c = 0; c < n; ++c)
    if (cls[c] == c) block_id[c] = blocks++;
  std::vector<std::int32_t> tab(blocks * w);
  for (int c = 0; c < n; ++c) {
    if (cls[c] != c) continue;
    for (int col = 0; col < w; ++col) tab[block_id[c] * w + col] = block_id[cls[t.entry(c, col)]];
  }
  CosetTable raw(t.presentation_ptr(), blocks, std::move(tab));
  return canonicalize(raw, block_id[cls[0]]);
}

}  // namespace detail

/// All overgroups H <= K <= G via block systems of the coset action: every
/// block system is a join of the minimal ones identifying the basepoint with
/// a single other coset. Includes H and G; sorted by index descending, then
/// by table order.
inline std::vector<CosetTable> overgroups(CosetTable const& t) {
  int n = t.index();
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);

  std::set<std::vector<int>> seen;  // keyed by base block
  std::vector<std::vector<int>> systems;
  auto add = [&](std::vector<int> const& cls) {
    if (seen.insert(detail::base_block(cls)).second) {
      systems.push_back(cls);
      return true;
    }
    return false;
  };
  add(identity);
  for (int p = 1; p < n; ++p) add(detail::minimal_block_system(t, p));

  for (std::size_t i = 0; i < systems.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      add(detail::join_partitions(systems[i], systems[j]));

  std::vector<CosetTable> out;
  out.reserve(systems.size());
  for (auto const& cls : systems) out.push_back(detail::block_action(t, cls));
  std::sort(out.begin(), out.end(), [](CosetTable const& a, CosetTable const& b) {
    if (a.index() != b.index()) return a.index() > b.index();
    return a.raw() < b.raw();
  });
  return out;
}

/// Atoms of the overgroup lattice strictly above H (the minimal strict
/// overgroups), each paired with a witness word in K \ H: the representative
/// of the smallest nonzero coset in K's base block.
inline std::vector<std::pair<CosetTable, Word>> overgroup_atoms(CosetTable const& t) {
  int n = t.index();
  std::vector<std::vector<int>> blocks;  // base blocks of minimal strict systems
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> systems;
  for (int p = 1; p < n; ++p) {
    auto cls = detail::minimal_block_system(t, p);
    auto blk = detail::base_block(cls);
    if (seen.insert(blk).second) {
      systems.push_back(cls);
      blocks.push_back(blk);
    }
  }
  auto tree = spanning_tree(t);
  std::vector<std::pair<CosetTable, Word>> out;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < systems.size() && minimal; ++j) {
      if (i == j) continue;
      if (std::includes(blocks[i].begin(), blocks[i].end(), blocks[j].begin(),
                        blocks[j].end()))
        minimal = false;  // a smaller strict system sits inside
    }
    if (!minimal) continue;
    int witness_coset = blocks[i][0] == 0 ? blocks[i][1] : blocks[i][0];
    out.emplace_back(detail::block_action(t, systems[i]), tree.rep[witness_coset]);
  }
  std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) {
    if (a.first.index() != b.first.index()) return a.first.index() > b.first.index();
    return a.first.raw() < b.first.raw();
  });
  return out;
}

/// [N_G(H) : H], counted as the number of cosets fixed by every Schreier
/// generator of H. Equals the index exactly when H is normal.
inline int normalizer_index(CosetTable const& t) {
  auto gens = schreier_generators(t);
  int count = 0;
  for (int c = 0; c < t.index(); ++c) {
    bool fixed = true;
    for (auto const& g : gens)
      if (t.trace(c, g) != c) {
        fixed = false;
        break;
      }
    if (fixed) ++count;
  }
  return count;
}

}  // namespace chab
