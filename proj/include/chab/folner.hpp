#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "chab/error.hpp"
#include "chab/permrep.hpp"
#include "chab/rational.hpp"
#include "chab/word.hpp"

namespace chab {

/// Exact Folner arithmetic for one candidate set: the ratio |wF \ F| / |F|
/// per test word, the maximum, and the strict comparison against epsilon.
struct FolnerReport {
  std::vector<int> set;                           // F, sorted
  std::vector<std::pair<Word, Rational>> ratios;  // per deduplicated word
  Rational max_ratio{0, 1};
  Rational epsilon{0, 1};
  bool pass = false;
};

namespace detail {

// |wF delta F| via exact set arithmetic; the action of a word is injective,
// so |wF| = |F| and the difference is 2(|F| - |wF n F|).
template <typename Action>
Rational displacement_ratio(Action const& action, std::set<int> const& f, Word const& w) {
  int inside = 0;
  for (int x : f)
    if (f.count(action.apply(w, x))) ++inside;
  long long diff = 2LL * (static_cast<long long>(f.size()) - inside);
  return Rational(diff, static_cast<long long>(f.size()));
}

template <typename Action>
FolnerReport folner_check_impl(Action const& action, std::vector<int> const& f_in,
                               std::vector<Word> const& omega, Rational epsilon) {
  if (f_in.empty()) throw err::empty_set();
  std::set<int> f(f_in.begin(), f_in.end());
  std::set<Word> words(omega.begin(), omega.end());
  FolnerReport report;
  report.set.assign(f.begin(), f.end());
  report.epsilon = epsilon;
  for (auto const& w : words) {
    Rational r = displacement_ratio(action, f, w);
    if (report.max_ratio < r) report.max_ratio = r;
    report.ratios.emplace_back(w, r);
  }
  report.pass = report.max_ratio < epsilon;  // strict, ties fail
  return report;
}

}  // namespace detail

inline FolnerReport folner_check(PermRep const& r, std::vector<int> const& f,
                                 std::vector<Word> const& omega, Rational epsilon) {
  for (auto const& w : omega) require_word_fits(w, r.presentation());
  return detail::folner_check_impl(r, f, omega, epsilon);
}

inline FolnerReport folner_check(WindowAction const& r, std::vector<int> const& f,
                                 std::vector<Word> const& omega, Rational epsilon) {
  for (auto const& w : omega) require_word_fits(w, r.presentation());
  return detail::folner_check_impl(r, f, omega, epsilon);
}

/// Outcome of the bounded Folner search. `found == false` means the search
/// strategy failed within the size budget; it is never a nonexistence proof.
struct FolnerSearchResult {
  bool found = false;
  std::vector<int> set;
  int budget = 0;
  FolnerReport report;
};

namespace detail {

struct OrbitPrefix {
  std::vector<int> points;  // generator-BFS discovery order
  bool closed = false;      // the collected set is the whole in-window orbit
  bool truncated = false;   // a window boundary was hit before the budget
};

template <typename Action>
OrbitPrefix orbit_prefix(Action const& action, int x, int limit) {
  OrbitPrefix out;
  out.points.push_back(x);
  out.closed = true;
  std::set<int> seen{x};
  int width = 2 * static_cast<int>(action.presentation().rank());
  for (std::size_t q = 0; q < out.points.size(); ++q)
    for (int col = 0; col < width; ++col) {
      int t = action.step(letter_of_column(col), out.points[q]);
      if (t < 0) {
        out.closed = false;
        if (static_cast<int>(out.points.size()) < limit) out.truncated = true;
        continue;
      }
      if (seen.count(t)) continue;
      if (static_cast<int>(out.points.size()) < limit) {
        seen.insert(t);
        out.points.push_back(t);
      } else {
        out.closed = false;  // the orbit continues past the budget
      }
    }
  return out;
}

template <typename Action>
bool in_window_images(Action const& action, std::vector<int> const& f,
                      std::vector<Word> const& omega) {
  for (auto const& w : omega)
    for (int x : f) {
      try {
        action.apply(w, x);
      } catch (Error const& e) {
        if (e.code() == "WindowExhausted") return false;
        throw;
      }
    }
  return true;
}

}  // namespace detail

/// Bounded search for an (epsilon, omega)-Folner subset of the orbit of x.
/// Strategy (fixed): grow BFS ball prefixes around x, then hill-climb by
/// single-point swaps minimizing the maximum ratio. Found(F) always
/// re-verifies under folner_check; a miss is strategy-relative, never a
/// nonexistence proof.
template <typename Action>
FolnerSearchResult folner_search(Action const& action, int x,
                                 std::vector<Word> const& omega, Rational epsilon,
                                 int max_size, int swap_steps = 200) {
  if (!(Rational(0, 1) < epsilon)) throw Error("BadEpsilon", "epsilon must be positive");
  if (max_size < 1) throw Error("BadParameter", "max_size must be >= 1");
  FolnerSearchResult result;
  result.budget = max_size;
  auto prefix = detail::orbit_prefix(action, x, max_size);
  if (prefix.truncated)
    throw err::window_exhausted("orbit truncation reached before the size budget");

  auto accept = [&](FolnerReport report) {
    result.found = true;
    result.set = report.set;
    result.report = std::move(report);
  };

  // A whole finite orbit is invariant: every ratio is zero.
  if (prefix.closed && detail::in_window_images(action, prefix.points, omega)) {
    auto report = folner_check(action, prefix.points, omega, epsilon);
    if (report.pass) {
      accept(std::move(report));
      return result;
    }
  }

  std::vector<int> best;
  Rational best_ratio{2, 1};
  for (int k = 1; k <= static_cast<int>(prefix.points.size()); ++k) {
    std::vector<int> f(prefix.points.begin(), prefix.points.begin() + k);
    if (!detail::in_window_images(action, f, omega)) break;
    auto report = folner_check(action, f, omega, epsilon);
    if (report.pass) {
      accept(std::move(report));
      return result;
    }
    if (report.max_ratio < best_ratio) {
      best_ratio = report.max_ratio;
      best = f;
    }
  }

  // Hill-climb: swap one member for one outside neighbor when it lowers the
  // maximum ratio, within the step budget.
  int width = 2 * static_cast<int>(action.presentation().rank());
  for (int step = 0; step < swap_steps && !best.empty(); ++step) {
    std::set<int> f(best.begin(), best.end());
    std::vector<int> frontier;
    for (int p : best)
      for (int col = 0; col < width; ++col) {
        int t = action.step(letter_of_column(col), p);
        if (t >= 0 && !f.count(t)) frontier.push_back(t);
      }
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    bool improved = false;
    for (int q : frontier) {
      for (std::size_t drop = 0; drop < best.size() && !improved; ++drop) {
        std::vector<int> cand = best;
        cand[drop] = q;
        if (std::set<int>(cand.begin(), cand.end()).size() != cand.size()) continue;
        if (!detail::in_window_images(action, cand, omega)) continue;
        auto report = folner_check(action, cand, omega, epsilon);
        if (report.pass) {
          accept(std::move(report));
          return result;
        }
        if (report.max_ratio < best_ratio) {
          best_ratio = report.max_ratio;
          best = cand;
          improved = true;
        }
      }
      if (improved) break;
    }
    if (!improved) break;
  }
  return result;  // NotFoundUpTo(max_size)
}

/// Probes co-amenability of H through the quasiregular action on G/H.
/// Finite-index handles short-circuit: the whole orbit is invariant.
inline FolnerSearchResult coamenable_probe(SubgroupHandle const& h,
                                           std::vector<Word> const& omega,
                                           Rational epsilon, int max_size,
                                           int radius = 6) {
  if (!(Rational(0, 1) < epsilon)) throw Error("BadEpsilon", "epsilon must be positive");
  auto rep = quasiregular(h, radius);
  if (h.finite_index()) {
    FolnerSearchResult result;
    result.budget = max_size;
    std::vector<int> all(rep.window_size());
    std::iota(all.begin(), all.end(), 0);
    result.report = folner_check(rep, all, omega, epsilon);
    result.found = result.report.pass;
    result.set = std::move(all);
    return result;
  }
  return folner_search(rep, 0, omega, epsilon, max_size);
}

/// The Baumslag-Solitar presentation <s,t | t^-1 s t = s^n>.
inline Presentation bs_presentation(int n) {
  std::vector<Letter> rel{-2, 1, 2};
  for (int i = 0; i < n; ++i) rel.push_back(-1);
  return Presentation(Alphabet({"s", "t"}), {Word::from_reduced(std::move(rel))});
}

/// One finite quotient of BS(1,n), read off a coset action: the permutation
/// image of s is conjugate to its n-th power there, which forces
/// gcd(ord(s), n) = 1.
struct BsQuotient {
  int index = 0;
  long long order_s = 0;
  long long quotient_order = 0;
  bool coprime = false;
};

struct BsProbeReport {
  int n = 0;
  int max_index = 0;
  std::vector<BsQuotient> quotients;
  bool nontrivial_witness = false;  // some quotient moves s
  bool pass = false;                // every quotient satisfies the obstruction
};

namespace detail {

inline long long permutation_order(std::vector<int> const& perm) {
  int n = static_cast<int>(perm.size());
  std::vector<bool> seen(n, false);
  long long order = 1;
  for (int x = 0; x < n; ++x) {
    if (seen[x]) continue;
    long long len = 0;
    int cur = x;
    while (!seen[cur]) {
      seen[cur] = true;
      ++len;
      cur = perm[cur];
    }
    order = std::lcm(order, len);
  }
  return order;
}

inline long long permutation_group_order(std::vector<std::vector<int>> const& gens) {
  int n = static_cast<int>(gens.front().size());
  std::vector<int> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::set<std::vector<int>> elements{id};
  std::vector<std::vector<int>> frontier{id};
  for (std::size_t q = 0; q < frontier.size(); ++q)
    for (auto const& g : gens) {
      std::vector<int> prod(n);
      for (int x = 0; x < n; ++x) prod[x] = g[frontier[q][x]];
      if (elements.insert(prod).second) frontier.push_back(prod);
    }
  return static_cast<long long>(elements.size());
}

}  // namespace detail

/// Checks one coset table of BS(1,n) against the conjugacy obstruction.
/// Split out so a deliberately corrupted table can exercise the failure
/// branch in tests.
inline BsQuotient bs_check_quotient(CosetTable const& t, int n) {
  BsQuotient q;
  q.index = t.index();
  std::vector<int> s_img(t.index()), t_img(t.index());
  for (int c = 0; c < t.index(); ++c) {
    s_img[c] = t.entry(c, 0);
    t_img[c] = t.entry(c, 2);
  }
  q.order_s = detail::permutation_order(s_img);
  q.quotient_order = detail::permutation_group_order({s_img, t_img});
  q.coprime = std::gcd(q.order_s, static_cast<long long>(n)) == 1;
  return q;
}

/// Enumerates every subgroup of BS(1,n) of index <= max_index and verifies
/// the finite-quotient obstruction on each coset action.
inline BsProbeReport bs_obstruction_probe(int n, int max_index,
                                          long long node_budget = 200'000'000) {
  if (n < 2) throw Error("BadParameter", "bs_obstruction_probe needs n >= 2");
  auto pres = std::make_shared<const Presentation>(bs_presentation(n));
  BsProbeReport report;
  report.n = n;
  report.max_index = max_index;
  report.pass = true;
  for (auto const& t : low_index(pres, max_index, node_budget)) {
    auto q = bs_check_quotient(t, n);
    if (!q.coprime) report.pass = false;
    if (q.order_s > 1) report.nontrivial_witness = true;
    report.quotients.push_back(q);
  }
  return report;
}

/// Result of the constructive free-product Folner builder: the adjusted
/// action of G * K on the shared window and the Folner set it certifies.
struct FreeProductFolner {
  WindowAction action;
  std::vector<int> folner_set;
  FolnerReport report;
  bool finite_orbit_case = false;  // the whole combined orbit was returned
};

/// Builds an (epsilon, S u T)-Folner set inside the combined orbit of x for
/// the free-product action sigma * tau.
///
/// When the combined orbit of x closes inside the window it is itself
/// invariant and is returned as F (ratio zero). Otherwise a tau-orbit Y
/// meeting the orbit of x is searched for an (epsilon, T)-Folner set F with
/// |F| > 2(|B|+1)/epsilon, where B = A u S.A for the locality set A (always
/// including x); sigma is then conjugated by the order-2 permutation that
/// swaps F \ (B u {y}) against sigma-fixed points away from B, F and the
/// connecting trace. The adjusted action fixes F up to B u {y}, which gives
/// |phi'(s)F delta F| <= 2(|B|+1) < epsilon |F|, leaves sigma untouched on
/// A, and keeps F inside the orbit of x.
inline FreeProductFolner free_product_folner(PermRep const& sigma, PermRep const& tau,
                                             int x, std::vector<Word> const& s_words,
                                             std::vector<Word> const& t_words,
                                             Rational epsilon,
                                             std::vector<int> locality = {}) {
  if (!(Rational(0, 1) < epsilon)) throw Error("BadEpsilon", "epsilon must be positive");
  for (auto const& w : s_words) require_word_fits(w, sigma.presentation());
  for (auto const& w : t_words) require_word_fits(w, tau.presentation());
  WindowAction sig = materialize(sigma);
  WindowAction ta = materialize(tau);
  if (sig.size() != ta.size())
    throw err::window_mismatch("sigma and tau windows differ in size");
  int n = sig.size();
  if (x < 0 || x >= n) throw err::index_out_of_range(x);
  WindowAction combined = free_product_rep(sig, ta);
  int g_rank = static_cast<int>(sigma.presentation().rank());

  auto lift_t = [&](Word const& w) {
    std::vector<Letter> letters;
    for (Letter l : w.letters()) letters.push_back(l > 0 ? l + g_rank : l - g_rank);
    return Word::from_reduced(std::move(letters));
  };
  std::vector<Word> combined_words = s_words;
  for (auto const& w : t_words) combined_words.push_back(lift_t(w));

  // Case 1: the combined orbit closes inside the window.
  try {
    auto orbit = combined.orbit(x);
    auto report = folner_check(combined, orbit, combined_words, epsilon);
    return FreeProductFolner{std::move(combined), std::move(orbit), std::move(report),
                             true};
  } catch (Error const& e) {
    if (e.code() != "WindowExhausted") throw;
  }

  // Case 2: B = A u S.A.
  std::set<int> a_set(locality.begin(), locality.end());
  a_set.insert(x);
  std::set<int> b_set = a_set;
  for (auto const& w : s_words)
    for (int a : a_set) b_set.insert(sig.apply(w, a));

  // Size floor: |F| >= min_size makes |F| > 2(|B|+1)/epsilon.
  long long min_size =
      2 * (static_cast<long long>(b_set.size()) + 1) * epsilon.den / epsilon.num + 1;

  // Combined-action BFS from x with parent links: reach[] gives deterministic
  // meeting points, and the BFS path to the first F-point y is a shortest
  // word z with trace(x, z) n F = {y}.
  std::vector<int> parent(n, -1);
  std::vector<int> reach{x};
  std::set<int> reached{x};
  int width = static_cast<int>(combined.columns().size());
  for (std::size_t q = 0; q < reach.size(); ++q)
    for (int col = 0; col < width; ++col) {
      int t = combined.columns()[col][reach[q]];
      if (t >= 0 && reached.insert(t).second) {
        parent[t] = reach[q];
        reach.push_back(t);
      }
    }

  std::set<int> tried;
  for (int y0 : reach) {
    auto t_orbit = ta.partial_orbit(y0);
    if (!tried.insert(*std::min_element(t_orbit.begin(), t_orbit.end())).second)
      continue;
    if (static_cast<long long>(t_orbit.size()) < min_size) continue;

    // (epsilon, T)-Folner search inside this tau-orbit with the size floor:
    // BFS ball prefixes around the meeting point.
    std::vector<int> f_found;
    {
      auto prefix = detail::orbit_prefix(ta, y0, static_cast<int>(t_orbit.size()));
      for (int k = static_cast<int>(min_size); k <= static_cast<int>(prefix.points.size());
           ++k) {
        std::vector<int> f(prefix.points.begin(), prefix.points.begin() + k);
        if (!detail::in_window_images(ta, f, t_words)) break;
        if (folner_check(ta, f, t_words, epsilon).pass) {
          f_found = std::move(f);
          break;
        }
      }
    }
    if (f_found.empty()) continue;
    std::set<int> f(f_found.begin(), f_found.end());

    // y: first point of F in combined BFS order; the path to it is z, whose
    // trace meets F in y alone.
    int y = -1;
    for (int p : reach)
      if (f.count(p)) {
        y = p;
        break;
      }
    if (y < 0) continue;  // F not in the reachable set after all
    std::vector<int> trace_points;
    for (int cur = y; cur != -1; cur = parent[cur]) trace_points.push_back(cur);

    std::vector<int> d_points;
    for (int p : f)
      if (!b_set.count(p) && p != y) d_points.push_back(p);

    std::set<int> excluded = b_set;
    excluded.insert(f.begin(), f.end());
    excluded.insert(trace_points.begin(), trace_points.end());
    std::vector<int> c_points;
    for (int p = 0; p < n && c_points.size() < d_points.size(); ++p) {
      if (excluded.count(p)) continue;
      bool fixed = true;
      for (int g = 0; g < g_rank && fixed; ++g)
        if (sig.columns()[2 * g][p] != p) fixed = false;
      if (fixed) c_points.push_back(p);
    }
    if (c_points.size() < d_points.size())
      throw err::insufficient_fixed_points(d_points.size(), c_points.size());

    // xi swaps C and D pointwise; phi' = xi sigma xi.
    std::vector<int> xi(n);
    std::iota(xi.begin(), xi.end(), 0);
    for (std::size_t i = 0; i < d_points.size(); ++i) {
      xi[c_points[i]] = d_points[i];
      xi[d_points[i]] = c_points[i];
    }
    std::vector<std::vector<std::int32_t>> phi_cols(2 * g_rank);
    for (int col = 0; col < 2 * g_rank; ++col) {
      phi_cols[col].assign(n, -1);
      for (int p = 0; p < n; ++p) {
        int t = sig.columns()[col][xi[p]];
        phi_cols[col][p] = t < 0 ? -1 : xi[t];
      }
    }
    WindowAction phi(sigma.presentation_ptr(), n, std::move(phi_cols));
    WindowAction result = free_product_rep(phi, ta);

    FreeProductFolner out;
    out.folner_set.assign(f.begin(), f.end());
    out.report = folner_check(result, out.folner_set, combined_words, epsilon);
    out.action = std::move(result);
    return out;
  }
  throw err::no_folner_in_orbit(
      "no tau-orbit meeting the orbit of x admits a Folner set of size >= "
      + std::to_string(min_size));
}

}  // namespace chab
