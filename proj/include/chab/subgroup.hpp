#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "chab/coset_table.hpp"
#include "chab/error.hpp"
#include "chab/stallings.hpp"
#include "chab/word.hpp"

namespace chab {

/// A point of Sub(G): a subgroup with a decidable membership oracle, backed
/// either by a complete coset table (finite index) or by a Stallings core
/// graph (finitely generated subgroup of a free group).
class SubgroupHandle {
 public:
  SubgroupHandle() = default;

  explicit SubgroupHandle(CosetTable table) : repr_(std::move(table)) {}
  explicit SubgroupHandle(CoreGraph core) : repr_(std::move(core)) {}

  bool is_table() const { return std::holds_alternative<CosetTable>(repr_); }
  bool is_core() const { return std::holds_alternative<CoreGraph>(repr_); }

  CosetTable const& table() const { return std::get<CosetTable>(repr_); }
  CoreGraph const& core() const { return std::get<CoreGraph>(repr_); }

  Presentation const& presentation() const {
    return is_table() ? table().presentation() : core().presentation();
  }
  PresentationPtr presentation_ptr() const {
    return is_table() ? table().presentation_ptr() : core().presentation_ptr();
  }

  bool member(Word const& w) const {
    return is_table() ? table().member(w) : contains(core(), w);
  }

  std::optional<int> index() const {
    if (is_table()) return table().index();
    return subgroup_index(core());
  }

  bool finite_index() const { return index().has_value(); }

  /// Finite-index handles in either representation convert to a canonical
  /// coset table; throws NotFiniteIndex otherwise.
  CosetTable as_table() const {
    if (is_table()) return table();
    if (!core().complete()) throw err::not_finite_index();
    return core_to_table(core());
  }

 private:
  std::variant<CosetTable, CoreGraph> repr_;
};

inline bool same_presentation(SubgroupHandle const& a, SubgroupHandle const& b) {
  return a.presentation_ptr() == b.presentation_ptr()
         || a.presentation() == b.presentation();
}

/// Canonical subgroup equality. Mixed representations compare through the
/// coset table when both sides have finite index.
inline bool handle_equal(SubgroupHandle const& a, SubgroupHandle const& b) {
  if (!same_presentation(a, b)) return false;
  if (a.is_table() && b.is_table()) return a.table() == b.table();
  if (a.is_core() && b.is_core()) return a.core() == b.core();
  if (a.finite_index() != b.finite_index()) return false;
  if (!a.finite_index()) return false;  // mixed representations, both infinite
  return a.as_table() == b.as_table();
}

/// Handle of g H g^-1.
inline SubgroupHandle conjugate(SubgroupHandle const& h, Word const& g) {
  require_word_fits(g, h.presentation());
  if (h.is_core()) return SubgroupHandle(conjugate_core(h.core(), g));
  return SubgroupHandle(rebase(h.table(), h.table().coset_of(g.inverse())));
}

/// Finite data determining the Chabauty window W(H, Omega): the words of
/// Omega that H must contain and the ones it must exclude.
struct MembershipConstraint {
  std::vector<Word> must_contain;
  std::vector<Word> must_exclude;
};

inline bool satisfies(SubgroupHandle const& k, MembershipConstraint const& c) {
  for (auto const& w : c.must_contain)
    if (!k.member(w)) return false;
  for (auto const& w : c.must_exclude)
    if (k.member(w)) return false;
  return true;
}

/// K and H agree on every membership question from omega, i.e. K lies in
/// the basic open set W(H, Omega).
inline bool window_test(SubgroupHandle const& k, SubgroupHandle const& h,
                        std::vector<Word> const& omega) {
  require_same_presentation(k.presentation(), h.presentation());
  for (auto const& w : omega)
    if (k.member(w) != h.member(w)) return false;
  return true;
}

/// Splits omega by H-membership; a handle satisfies the result exactly when
/// it passes window_test against H on omega.
inline MembershipConstraint constraint_of_window(SubgroupHandle const& h,
                                                 std::vector<Word> const& omega) {
  std::set<Word> in, out;
  for (auto const& w : omega) (h.member(w) ? in : out).insert(w);
  MembershipConstraint c;
  c.must_contain.assign(in.begin(), in.end());
  c.must_exclude.assign(out.begin(), out.end());
  return c;
}

/// Isolation certificate for a finite-index subgroup H of a finitely
/// generated group: S1 = Schreier generators (any subgroup containing them
/// contains H, hence lies in the finite envelope Env(H)), S2 = one witness
/// word per atom of the overgroup lattice strictly above H (every strict
/// overgroup contains an atom, hence a witness). H is then the unique
/// subgroup satisfying the constraint.
inline MembershipConstraint isolation_certificate(SubgroupHandle const& h) {
  CosetTable t = h.as_table();  // throws NotFiniteIndex
  MembershipConstraint c;
  std::set<Word> contain;
  for (auto& w : schreier_generators(t)) contain.insert(std::move(w));
  c.must_contain.assign(contain.begin(), contain.end());
  std::set<Word> exclude;
  for (auto& [atom, witness] : overgroup_atoms(t)) exclude.insert(witness);
  c.must_exclude.assign(exclude.begin(), exclude.end());
  return c;
}

/// Result of checking a certificate against a finite universe of subgroups.
struct CertificateReport {
  bool pass = false;
  bool handle_satisfies = false;
  std::vector<std::size_t> collisions;  // universe members equal to h that satisfy
  std::vector<std::size_t> offenders;   // distinct members that also satisfy
};

namespace detail {

// Trace-only membership for words already validated against the handle's
// presentation; the hot loop of certificate verification lives here.
inline bool member_unchecked(SubgroupHandle const& h, Word const& w) {
  return h.is_table() ? h.table().trace(0, w) == 0 : h.core().walk(0, w) == 0;
}

inline bool satisfies_unchecked(SubgroupHandle const& k, MembershipConstraint const& c) {
  for (auto const& w : c.must_contain)
    if (!member_unchecked(k, w)) return false;
  for (auto const& w : c.must_exclude)
    if (member_unchecked(k, w)) return false;
  return true;
}

}  // namespace detail

/// Verifies that h satisfies c and that every member of the universe other
/// than h violates it. Duplicates of h in the universe are reported as
/// collisions and fail the check. Certificate words are compiled to column
/// sequences once, so scanning a large table universe costs one raw trace
/// per word per member.
inline CertificateReport verify_certificate(MembershipConstraint const& c,
                                            SubgroupHandle const& h,
                                            std::vector<SubgroupHandle> const& universe) {
  for (auto const& w : c.must_contain) require_word_fits(w, h.presentation());
  for (auto const& w : c.must_exclude) require_word_fits(w, h.presentation());
  auto compile = [](std::vector<Word> const& words) {
    std::vector<std::vector<std::int32_t>> out;
    for (auto const& w : words) {
      std::vector<std::int32_t> cols;
      cols.reserve(w.size());
      for (Letter l : w.letters()) cols.push_back(column_of(l));
      out.push_back(std::move(cols));
    }
    return out;
  };
  auto contain_cols = compile(c.must_contain);
  auto exclude_cols = compile(c.must_exclude);
  auto satisfies_table = [&](CosetTable const& t) {
    std::int32_t const* data = t.raw().data();
    int width = t.width();
    for (auto const& cols : contain_cols) {
      std::int32_t p = 0;
      for (auto col : cols) p = data[p * width + col];
      if (p != 0) return false;
    }
    for (auto const& cols : exclude_cols) {
      std::int32_t p = 0;
      for (auto col : cols) p = data[p * width + col];
      if (p == 0) return false;
    }
    return true;
  };
  CertificateReport report;
  report.handle_satisfies = satisfies(h, c);
  bool seen_self = false;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (!same_presentation(universe[i], h)) throw err::alphabet_mismatch();
    bool sat = universe[i].is_table() ? satisfies_table(universe[i].table())
                                      : detail::satisfies_unchecked(universe[i], c);
    if (!sat) continue;
    if (handle_equal(universe[i], h)) {
      if (seen_self)
        report.collisions.push_back(i);
      else
        seen_self = true;
    } else {
      report.offenders.push_back(i);
    }
  }
  report.pass = report.handle_satisfies && report.collisions.empty()
                && report.offenders.empty();
  return report;
}

}  // namespace chab
