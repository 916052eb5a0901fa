#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "chab/coset_table.hpp"
#include "chab/error.hpp"
#include "chab/low_index.hpp"
#include "chab/subgroup.hpp"
#include "chab/todd_coxeter.hpp"
#include "chab/word.hpp"

namespace chab {

// Permutation representations act on the left: a word w = w_k ... w_1 moves a
// point x to w_k(...(w_1 x)), rightmost letter first, so apply is a group
// homomorphism into the symmetric group of the window. Coset tables trace
// membership in the opposite reading; the two meet in the identity
// phi(letter) = table column of the inverse letter.

/// Finite transitive component: a coset table together with its left action
/// materialized on points numbered by action-BFS from the basepoint.
struct FiniteOrbit {
  CosetTable table;
  std::vector<std::int32_t> act;   // size n * width; act[p * width + col]
  std::vector<int> coset_of_point; // point -> coset of `table`

  int size() const { return table.index(); }
};

/// Truncated infinite transitive component G -> G/H: points are coset
/// representatives, reduced words enumerated by BFS up to expansion_radius.
/// Coset equality uH = vH is decided by the membership oracle. The whole
/// truncation is materialized at construction and immutable afterwards, so
/// concurrent reads need no synchronization.
struct LazyOrbit {
  SubgroupHandle handle;
  int radius = 0;
  std::vector<Word> reps;
  std::vector<std::int32_t> act;  // -1 where the image leaves the window
  std::map<Word, int> rep_index;

  int size() const { return static_cast<int>(reps.size()); }
};

namespace detail {

inline FiniteOrbit make_finite_orbit(CosetTable table) {
  int n = table.index(), width = table.width();
  // Renumber points by BFS over the left action (columns 1,0,3,2,... of the
  // table) so that following a generator from the basepoint lands on point 1.
  std::vector<int> point_of_coset(n, -1), coset_of_point;
  coset_of_point.reserve(n);
  point_of_coset[0] = 0;
  coset_of_point.push_back(0);
  for (std::size_t q = 0; q < coset_of_point.size(); ++q) {
    int c = coset_of_point[q];
    for (int col = 0; col < width; ++col) {
      int t = table.entry(c, col ^ 1);  // phi(letter of col) = column of inverse
      if (point_of_coset[t] < 0) {
        point_of_coset[t] = static_cast<int>(coset_of_point.size());
        coset_of_point.push_back(t);
      }
    }
  }
  if (static_cast<int>(coset_of_point.size()) != n)
    throw Error("NotTransitive", "orbit component must be transitive");
  std::vector<std::int32_t> act(static_cast<std::size_t>(n) * width);
  for (int p = 0; p < n; ++p)
    for (int col = 0; col < width; ++col)
      act[p * width + col] = point_of_coset[table.entry(coset_of_point[p], col ^ 1)];
  return FiniteOrbit{std::move(table), std::move(act), std::move(coset_of_point)};
}

inline int locate_coset(LazyOrbit const& orbit, Word const& w) {
  if (auto it = orbit.rep_index.find(w); it != orbit.rep_index.end()) return it->second;
  for (int i = 0; i < orbit.size(); ++i)
    if (orbit.handle.member(multiply(invert(orbit.reps[i]), w))) return i;
  return -1;
}

inline LazyOrbit make_lazy_orbit(SubgroupHandle handle, int radius) {
  LazyOrbit orbit;
  orbit.handle = std::move(handle);
  orbit.radius = radius;
  orbit.reps.push_back(Word());
  orbit.rep_index[Word()] = 0;
  int width = 2 * static_cast<int>(orbit.handle.presentation().rank());
  std::vector<std::vector<std::int32_t>> rows{std::vector<std::int32_t>(width, -2)};
  for (int p = 0; p < static_cast<int>(orbit.reps.size()); ++p) {
    for (int col = 0; col < width; ++col) {
      Word image = multiply(Word::from_reduced({letter_of_column(col)}), orbit.reps[p]);
      int found = locate_coset(orbit, image);
      if (found < 0 && static_cast<int>(image.size()) <= radius) {
        found = orbit.size();
        orbit.reps.push_back(image);
        orbit.rep_index[image] = found;
        rows.emplace_back(width, -2);
      }
      rows[p][col] = found;  // -1 = beyond the truncation
    }
  }
  orbit.act.reserve(static_cast<std::size_t>(orbit.size()) * width);
  for (auto const& row : rows)
    for (auto v : row) orbit.act.push_back(v);
  return orbit;
}

}  // namespace detail

using Component = std::variant<FiniteOrbit, LazyOrbit>;

inline int component_size(Component const& c) {
  return std::visit([](auto const& o) { return o.size(); }, c);
}

/// Finite truncation of an element of Hom(G, X!): transitive components with
/// multiplicities, in canonical order, with consecutive global point labels
/// (component by component, copy by copy).
class PermRep {
 public:
  PermRep() = default;

  PermRep(PresentationPtr pres, std::vector<std::pair<Component, int>> components)
      : pres_(std::move(pres)), components_(std::move(components)) {
    canonicalize_components();
  }

  Presentation const& presentation() const { return *pres_; }
  PresentationPtr presentation_ptr() const { return pres_; }

  std::vector<std::pair<Component, int>> const& components() const {
    return components_;
  }

  int window_size() const {
    int total = 0;
    for (auto const& [c, mult] : components_) total += component_size(c) * mult;
    return total;
  }

  struct Place {
    int entry;  // index into components_
    int copy;
    int local;
  };

  Place resolve(int label) const {
    int x = label;
    for (int e = 0; e < static_cast<int>(components_.size()); ++e) {
      int sz = component_size(components_[e].first);
      int span = sz * components_[e].second;
      if (x < span) return Place{e, x / sz, x % sz};
      x -= span;
    }
    throw err::index_out_of_range(label);
  }

  int label_of(Place const& pl) const {
    int base = 0;
    for (int e = 0; e < pl.entry; ++e)
      base += component_size(components_[e].first) * components_[e].second;
    return base + pl.copy * component_size(components_[pl.entry].first) + pl.local;
  }

  /// w . x, rightmost letter acting first. Lazy components answer by
  /// reducing w against the representative; WindowExhausted when the result
  /// lies beyond the truncation.
  int apply(Word const& w, int x) const {
    require_word_fits(w, *pres_);
    Place pl = resolve(x);
    auto const& comp = components_[pl.entry].first;
    if (auto const* fin = std::get_if<FiniteOrbit>(&comp)) {
      int width = fin->table.width();
      int p = pl.local;
      auto const& letters = w.letters();
      for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        p = fin->act[p * width + column_of(*it)];
      return label_of(Place{pl.entry, pl.copy, p});
    }
    auto const& lazy = std::get<LazyOrbit>(comp);
    Word image = multiply(w, lazy.reps[pl.local]);
    int p = detail::locate_coset(lazy, image);
    if (p < 0)
      throw err::window_exhausted("image of point " + std::to_string(x)
                                  + " lies beyond the expansion radius");
    return label_of(Place{pl.entry, pl.copy, p});
  }

  /// Single-letter step; -1 when the image leaves the window.
  int step(Letter l, int x) const {
    Place pl = resolve(x);
    auto const& comp = components_[pl.entry].first;
    int width = 2 * static_cast<int>(pres_->rank());
    int p = std::visit(
        [&](auto const& o) { return static_cast<int>(o.act[pl.local * width + column_of(l)]); },
        comp);
    if (p < 0) return -1;
    return label_of(Place{pl.entry, pl.copy, p});
  }

  /// Stabilizer subgroup of a point: table rebased at the point's coset for
  /// finite orbits, u H u^-1 for a lazy point with representative u.
  SubgroupHandle stabilizer(int x) const {
    Place pl = resolve(x);
    auto const& comp = components_[pl.entry].first;
    if (auto const* fin = std::get_if<FiniteOrbit>(&comp))
      return SubgroupHandle(rebase(fin->table, fin->coset_of_point[pl.local]));
    auto const& lazy = std::get<LazyOrbit>(comp);
    return conjugate(lazy.handle, lazy.reps[pl.local]);
  }

  friend bool operator==(PermRep const& a, PermRep const& b) {
    if (*a.pres_ != *b.pres_) return false;
    if (a.components_.size() != b.components_.size()) return false;
    for (std::size_t i = 0; i < a.components_.size(); ++i) {
      if (a.components_[i].second != b.components_[i].second) return false;
      if (component_key(a.components_[i].first) != component_key(b.components_[i].first))
        return false;
    }
    return true;
  }
  friend bool operator!=(PermRep const& a, PermRep const& b) { return !(a == b); }

  // Canonical sort key: finite orbits before lazy ones, then by canonical
  // form. Exposed for serialization.
  static std::tuple<int, int, std::vector<std::int32_t>, int>
  component_key(Component const& c) {
    if (auto const* fin = std::get_if<FiniteOrbit>(&c))
      return {0, fin->table.index(), fin->table.raw(), 0};
    auto const& lazy = std::get<LazyOrbit>(c);
    if (lazy.handle.is_core())
      return {1, lazy.handle.core().vertex_count(),
              lazy.handle.core().succ(), lazy.radius};
    return {1, lazy.handle.table().index(), lazy.handle.table().raw(), lazy.radius};
  }

 private:
  void canonicalize_components() {
    for (auto const& [c, mult] : components_)
      if (mult < 1) throw Error("BadMultiplicity", "multiplicities must be >= 1");
    std::stable_sort(components_.begin(), components_.end(),
                     [](auto const& a, auto const& b) {
                       return component_key(a.first) < component_key(b.first);
                     });
    std::vector<std::pair<Component, int>> merged;
    for (auto& entry : components_) {
      if (!merged.empty()
          && component_key(merged.back().first) == component_key(entry.first))
        merged.back().second += entry.second;
      else
        merged.push_back(std::move(entry));
    }
    components_ = std::move(merged);
  }

  PresentationPtr pres_;
  std::vector<std::pair<Component, int>> components_;
};

/// The quasiregular representation G -> G/H: one finite orbit when H has
/// finite index, one truncated lazy orbit otherwise.
inline PermRep quasiregular(SubgroupHandle const& h, int radius = 6) {
  std::vector<std::pair<Component, int>> comps;
  if (h.finite_index())
    comps.emplace_back(detail::make_finite_orbit(h.as_table()), 1);
  else
    comps.emplace_back(detail::make_lazy_orbit(h, radius), 1);
  return PermRep(h.presentation_ptr(), std::move(comps));
}

/// Disjoint union with multiplicities; canonical component order makes the
/// operation commutative and multiplicative over repeated parts.
inline PermRep disjoint_union(std::vector<std::pair<PermRep, int>> const& parts) {
  if (parts.empty()) throw err::empty_set();
  PresentationPtr pres = parts.front().first.presentation_ptr();
  std::vector<std::pair<Component, int>> comps;
  for (auto const& [rep, mult] : parts) {
    require_same_presentation(*pres, rep.presentation());
    if (mult < 1) throw Error("BadMultiplicity", "multiplicities must be >= 1");
    for (auto const& [c, m] : rep.components()) comps.emplace_back(c, m * mult);
  }
  return PermRep(std::move(pres), std::move(comps));
}

/// Appends m fresh quasiregular orbits of h.
inline PermRep add_orbits(PermRep const& r, SubgroupHandle const& h, int m,
                          int radius = 6) {
  require_same_presentation(r.presentation(), h.presentation());
  if (m == 0) return r;
  if (m < 0) throw Error("BadMultiplicity", "multiplicities must be >= 0");
  return disjoint_union({{r, 1}, {quasiregular(h, radius), m}});
}

/// Appends k one-point trivial orbits (fixed points).
inline PermRep add_fixed_points(PermRep const& r, int k) {
  if (k == 0) return r;
  std::vector<Word> gens;
  for (std::size_t i = 0; i < r.presentation().rank(); ++i)
    gens.push_back(r.presentation().generator(i));
  auto one = todd_coxeter(r.presentation_ptr(), gens, 2);
  return add_orbits(r, SubgroupHandle(std::move(*one)), k);
}

/// True when two finite-index tables present conjugate subgroups: some
/// rebasing of one equals the other.
inline bool tables_conjugate(CosetTable const& a, CosetTable const& b) {
  if (a.presentation() != b.presentation() || a.index() != b.index()) return false;
  for (int c = 0; c < a.index(); ++c)
    if (rebase(a, c) == b) return true;
  return false;
}

/// Truncated generic representation of a group whose finite-index subgroups
/// are dense: `copies` quasiregular orbits for each subgroup of index
/// <= max_index, one orbit per conjugacy class.
inline PermRep tau_star_lerf(PresentationPtr pres, int max_index, int copies,
                             long long node_budget = 200'000'000) {
  if (copies < 1) throw Error("BadMultiplicity", "copies must be >= 1");
  auto tables = low_index(pres, max_index, node_budget);
  std::vector<CosetTable> reps;
  for (auto& t : tables) {
    bool dup = false;
    for (auto const& kept : reps)
      if (tables_conjugate(kept, t)) {
        dup = true;
        break;
      }
    if (!dup) reps.push_back(std::move(t));
  }
  std::vector<std::pair<Component, int>> comps;
  for (auto& t : reps) comps.emplace_back(detail::make_finite_orbit(std::move(t)), copies);
  return PermRep(std::move(pres), std::move(comps));
}

inline PermRep tau_star_lerf(Presentation const& pres, int max_index, int copies,
                             long long node_budget = 200'000'000) {
  return tau_star_lerf(std::make_shared<const Presentation>(pres), max_index, copies,
                       node_budget);
}

enum class OrbitClass { kDelta, kSigma };

/// Truncated generic representation from classified isolated subgroups:
/// Delta classes (finite index in their normalizer) contribute `copies`
/// orbits each, Sigma classes exactly one. Finite-index handles are always
/// Delta and must be pairwise non-conjugate.
inline PermRep tau_star_solitary(
    std::vector<std::pair<SubgroupHandle, OrbitClass>> const& classified, int copies,
    int radius) {
  if (classified.empty()) throw err::empty_set();
  if (copies < 1) throw Error("BadMultiplicity", "copies must be >= 1");
  PresentationPtr pres = classified.front().first.presentation_ptr();
  for (auto const& [h, cls] : classified) {
    require_same_presentation(*pres, h.presentation());
    if (cls == OrbitClass::kSigma && h.finite_index()) throw err::invalid_classification();
  }
  for (std::size_t i = 0; i < classified.size(); ++i)
    for (std::size_t j = i + 1; j < classified.size(); ++j) {
      auto const& a = classified[i].first;
      auto const& b = classified[j].first;
      if (a.finite_index() && b.finite_index()
          && tables_conjugate(a.as_table(), b.as_table()))
        throw err::conjugate_duplicate();
    }
  std::vector<std::pair<Component, int>> comps;
  for (auto const& [h, cls] : classified) {
    int mult = cls == OrbitClass::kDelta ? copies : 1;
    if (h.finite_index())
      comps.emplace_back(detail::make_finite_orbit(h.as_table()), mult);
    else
      comps.emplace_back(detail::make_lazy_orbit(h, radius), mult);
  }
  return PermRep(std::move(pres), std::move(comps));
}

/// Basic open set O(base, T, A) of the topology on Hom(G, X!).
struct BasicOpen {
  PermRep base;
  std::vector<Word> words;   // T
  std::vector<int> points;   // A
};

/// sigma lies in O(rho, T, A): the two actions agree on every t.a.
inline bool in_basic_open(PermRep const& candidate, BasicOpen const& o) {
  require_same_presentation(candidate.presentation(), o.base.presentation());
  for (auto const& t : o.words)
    for (int a : o.points)
      if (candidate.apply(t, a) != o.base.apply(t, a)) return false;
  return true;
}

/// Trace of x under w: x and the images of x under every suffix of w
/// (rightmost letters act first), collected as a set.
inline std::set<int> trace(PermRep const& r, int x, Word const& w) {
  std::set<int> out{x};
  int cur = x;
  auto const& letters = w.letters();
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    cur = r.step(*it, cur);
    if (cur < 0)
      throw err::window_exhausted("trace leaves the materialized window");
    out.insert(cur);
  }
  return out;
}

/// A materialized finite window: one partial permutation array per column,
/// -1 marking images beyond the truncation. This is the working form for
/// relabelings, free products and Folner arithmetic.
class WindowAction {
 public:
  WindowAction() = default;

  WindowAction(PresentationPtr pres, int n, std::vector<std::vector<std::int32_t>> cols)
      : pres_(std::move(pres)), n_(n), cols_(std::move(cols)) {}

  Presentation const& presentation() const { return *pres_; }
  PresentationPtr presentation_ptr() const { return pres_; }
  int size() const { return n_; }
  std::vector<std::vector<std::int32_t>> const& columns() const { return cols_; }

  int step(Letter l, int x) const { return cols_[column_of(l)][x]; }

  int apply(Word const& w, int x) const {
    auto const& letters = w.letters();
    int cur = x;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
      cur = step(*it, cur);
      if (cur < 0) throw err::window_exhausted("image leaves the window");
    }
    return cur;
  }

  /// Orbit of x inside the window; throws WindowExhausted if the orbit
  /// reaches the truncation boundary (so completeness cannot be certified).
  std::vector<int> orbit(int x) const {
    std::vector<int> order{x};
    std::set<int> seen{x};
    for (std::size_t q = 0; q < order.size(); ++q)
      for (auto const& col : cols_) {
        int t = col[order[q]];
        if (t < 0)
          throw err::window_exhausted("orbit reaches the truncation boundary");
        if (seen.insert(t).second) order.push_back(t);
      }
    return order;
  }

  /// Orbit of x restricted to in-window edges (boundary edges skipped).
  std::vector<int> partial_orbit(int x) const {
    std::vector<int> order{x};
    std::set<int> seen{x};
    for (std::size_t q = 0; q < order.size(); ++q)
      for (auto const& col : cols_) {
        int t = col[order[q]];
        if (t >= 0 && seen.insert(t).second) order.push_back(t);
      }
    return order;
  }

  /// Stabilizer of x computed from the window alone: the orbit of x must be
  /// complete in-window; it is then a coset table of the presentation.
  SubgroupHandle stabilizer(int x) const {
    auto pts = orbit(x);
    std::vector<int> local(n_, -1);
    for (std::size_t i = 0; i < pts.size(); ++i) local[pts[i]] = static_cast<int>(i);
    int n = static_cast<int>(pts.size());
    int width = static_cast<int>(cols_.size());
    std::vector<std::int32_t> tab(static_cast<std::size_t>(n) * width);
    for (int p = 0; p < n; ++p)
      for (int col = 0; col < width; ++col)
        tab[p * width + col] = local[cols_[col ^ 1][pts[p]]];  // table column = phi of inverse
    return SubgroupHandle(canonicalize(CosetTable(pres_, n, std::move(tab))));
  }

  /// Lengths of the cycles of a generator, sorted; requires the column to be
  /// total on the window.
  std::vector<int> cycle_lengths(Letter l) const {
    auto const& col = cols_[column_of(l)];
    std::vector<bool> seen(n_, false);
    std::vector<int> out;
    for (int x = 0; x < n_; ++x) {
      if (seen[x]) continue;
      int len = 0, cur = x;
      while (!seen[cur]) {
        seen[cur] = true;
        ++len;
        cur = col[cur];
        if (cur < 0) throw err::window_exhausted("cycle leaves the window");
      }
      out.push_back(len);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  PresentationPtr pres_;
  int n_ = 0;
  std::vector<std::vector<std::int32_t>> cols_;
};

/// Materializes the window of a PermRep as column arrays with global labels.
inline WindowAction materialize(PermRep const& r) {
  int n = r.window_size();
  int width = 2 * static_cast<int>(r.presentation().rank());
  std::vector<std::vector<std::int32_t>> cols(width, std::vector<std::int32_t>(n, -1));
  for (int x = 0; x < n; ++x)
    for (int col = 0; col < width; ++col)
      cols[col][x] = r.step(letter_of_column(col), x);
  return WindowAction(r.presentation_ptr(), n, std::move(cols));
}

namespace detail {

inline std::vector<int> inverse_of_bijection(std::vector<int> const& alpha, int n) {
  if (static_cast<int>(alpha.size()) != n) throw err::not_a_bijection();
  std::vector<int> inv(n, -1);
  for (int x = 0; x < n; ++x) {
    if (alpha[x] < 0 || alpha[x] >= n || inv[alpha[x]] != -1)
      throw err::not_a_bijection();
    inv[alpha[x]] = x;
  }
  return inv;
}

}  // namespace detail

/// The conjugated action alpha . phi: x -> alpha(phi(alpha^-1 x)), returned
/// as a window action over the same labels.
inline WindowAction conjugate_rep(PermRep const& r, std::vector<int> const& alpha) {
  WindowAction w = materialize(r);
  auto inv = detail::inverse_of_bijection(alpha, w.size());
  int width = static_cast<int>(w.columns().size());
  std::vector<std::vector<std::int32_t>> cols(width,
                                              std::vector<std::int32_t>(w.size(), -1));
  for (int x = 0; x < w.size(); ++x)
    for (int col = 0; col < width; ++col) {
      int t = w.columns()[col][inv[x]];
      cols[col][x] = t < 0 ? -1 : alpha[t];
    }
  return WindowAction(r.presentation_ptr(), w.size(), std::move(cols));
}

/// Free product presentation: disjoint generator union, concatenated
/// relators. Generator names must not clash.
inline Presentation free_product(Presentation const& g, Presentation const& k) {
  std::vector<std::string> names = g.alphabet().names();
  for (auto const& n : k.alphabet().names()) {
    if (g.alphabet().index_of(n) >= 0) throw err::generator_name_clash(n);
    names.push_back(n);
  }
  std::vector<Word> relators = g.relators();
  int shift = static_cast<int>(g.rank());
  for (auto const& r : k.relators()) {
    std::vector<Letter> letters;
    for (Letter l : r.letters())
      letters.push_back(l > 0 ? l + shift : l - shift);
    relators.push_back(Word::from_reduced(std::move(letters)));
  }
  return Presentation(Alphabet(std::move(names)), std::move(relators));
}

/// The action phi * psi of G * K on a shared window: G letters act through
/// phi, K letters through psi composed with the aligning bijection
/// (psi-labels -> phi-labels; empty = identity).
inline WindowAction free_product_rep(WindowAction const& phi, WindowAction const& psi,
                                     std::vector<int> align = {}) {
  if (phi.size() != psi.size())
    throw err::window_mismatch("factor windows differ in size: "
                               + std::to_string(phi.size()) + " vs "
                               + std::to_string(psi.size()));
  int n = phi.size();
  if (align.empty()) {
    align.resize(n);
    for (int i = 0; i < n; ++i) align[i] = i;
  }
  auto inv = detail::inverse_of_bijection(align, n);
  auto pres = std::make_shared<const Presentation>(
      free_product(phi.presentation(), psi.presentation()));
  std::vector<std::vector<std::int32_t>> cols;
  for (auto const& c : phi.columns()) cols.push_back(c);
  for (auto const& c : psi.columns()) {
    std::vector<std::int32_t> mapped(n, -1);
    for (int x = 0; x < n; ++x) {
      int t = c[inv[x]];
      mapped[x] = t < 0 ? -1 : align[t];
    }
    cols.push_back(std::move(mapped));
  }
  return WindowAction(std::move(pres), n, std::move(cols));
}

inline WindowAction free_product_rep(PermRep const& phi, PermRep const& psi,
                                     std::vector<int> align = {}) {
  return free_product_rep(materialize(phi), materialize(psi), std::move(align));
}

}  // namespace chab
