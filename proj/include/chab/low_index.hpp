#pragma once

#include <cstdint>
#include <vector>

#include "chab/coset_table.hpp"
#include "chab/error.hpp"
#include "chab/word.hpp"

namespace chab {
namespace detail {

// Backtracking enumeration of all complete transitive coset tables on at
// most max_index points, in BFS-canonical numbering. Each subgroup of index
// <= max_index corresponds to exactly one such table, so the output has one
// entry per pointed subgroup, not per conjugacy class.
class LowIndex {
 public:
  LowIndex(Presentation const& pres, int max_index, long long node_budget)
      : pres_(pres),
        width_(2 * static_cast<int>(pres.rank())),
        max_index_(max_index),
        node_budget_(node_budget) {
    tab_.assign(static_cast<std::size_t>(max_index_) * width_, -1);
    n_used_ = 1;
  }

  std::vector<CosetTable> run(PresentationPtr pres_ptr) {
    pres_ptr_ = std::move(pres_ptr);
    search();
    std::sort(results_.begin(), results_.end());
    return std::move(results_);
  }

 private:
  std::int32_t& at(int c, int col) { return tab_[c * width_ + col]; }

  void search() {
    if (++nodes_ > node_budget_)
      throw err::resource_budget_exceeded("low_index node budget exhausted");
    int r = -1, c = -1;
    for (int coset = 0; coset < n_used_ && r < 0; ++coset)
      for (int col = 0; col < width_; ++col)
        if (at(coset, col) == -1) {
          r = coset;
          c = col;
          break;
        }
    if (r < 0) {
      emit();
      return;
    }
    // A new coset may only take the next unused number; this makes every
    // completed table BFS-canonical and the enumeration duplicate-free.
    int t_max = n_used_ < max_index_ ? n_used_ : n_used_ - 1;
    for (int t = 0; t <= t_max; ++t) {
      if (t < n_used_ && at(t, c ^ 1) != -1) continue;  // inverse slot taken
      std::vector<int> trail;
      bool grew = (t == n_used_);
      if (grew) ++n_used_;
      set_pair(r, c, t, trail);
      if (deduce(trail)) search();
      for (auto it = trail.rbegin(); it != trail.rend(); ++it) tab_[*it] = -1;
      if (grew) --n_used_;
    }
  }

  // Sets coset.col = target together with the inverse entry, recording every
  // cell it writes. Cells already holding the consistent value are left
  // untouched so the trail never double-books a cell.
  void set_pair(int coset, int col, int target, std::vector<int>& trail) {
    if (at(coset, col) == -1) {
      at(coset, col) = target;
      trail.push_back(coset * width_ + col);
    }
    if (at(target, col ^ 1) == -1) {
      at(target, col ^ 1) = coset;
      trail.push_back(target * width_ + (col ^ 1));
    }
  }

  // Fixpoint relator propagation: a scan with a single gap forces the entry,
  // a completed scan that fails to close kills the branch. New cosets are
  // never introduced here.
  bool deduce(std::vector<int>& trail) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto const& rel : pres_.relators()) {
        auto const& letters = rel.letters();
        if (letters.empty()) continue;
        for (int a = 0; a < n_used_; ++a) {
          int i = 0, j = static_cast<int>(letters.size()) - 1;
          int f = a, b = a;
          while (i <= j && at(f, column_of(letters[i])) != -1)
            f = at(f, column_of(letters[i++]));
          if (i > j) {
            if (f != b) return false;  // closed scan does not return
            continue;
          }
          while (j > i && at(b, column_of(letters[j]) ^ 1) != -1)
            b = at(b, column_of(letters[j--]) ^ 1);
          if (j > i) continue;  // gap of length >= 2: leave for the search
          // j == i and the forward entry is undefined here by construction.
          int col = column_of(letters[i]);
          int bwd = at(b, col ^ 1);
          if (bwd != -1 && bwd != f) return false;
          set_pair(f, col, b, trail);
          changed = true;
        }
      }
    }
    return true;
  }

  void emit() {
    std::vector<std::int32_t> tab(tab_.begin(), tab_.begin() + n_used_ * width_);
    results_.emplace_back(pres_ptr_, n_used_, std::move(tab));
  }

  Presentation const& pres_;
  PresentationPtr pres_ptr_;
  int width_;
  int max_index_;
  long long node_budget_;
  long long nodes_ = 0;
  int n_used_;
  std::vector<std::int32_t> tab_;
  std::vector<CosetTable> results_;
};

}  // namespace detail

/// All subgroups of index <= max_index, one canonical table per subgroup,
/// sorted by (index, lexicographic table order).
inline std::vector<CosetTable> low_index(PresentationPtr pres, int max_index,
                                         long long node_budget = 200'000'000) {
  if (max_index < 1) return {};
  detail::LowIndex search(*pres, max_index, node_budget);
  return search.run(pres);
}

inline std::vector<CosetTable> low_index(Presentation const& pres, int max_index,
                                         long long node_budget = 200'000'000) {
  return low_index(std::make_shared<const Presentation>(pres), max_index, node_budget);
}

}  // namespace chab
