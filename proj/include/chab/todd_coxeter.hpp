#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "chab/coset_table.hpp"
#include "chab/word.hpp"

namespace chab {
namespace detail {

// HLT-style coset enumeration with immediate coincidence processing.
// Definition order is deterministic: cosets are scanned in numeric order,
// relators in presentation order, and undefined row entries are filled in
// column order, so the same input always yields the same table.
class ToddCoxeter {
 public:
  ToddCoxeter(Presentation const& pres, int max_live)
      : pres_(pres), width_(2 * static_cast<int>(pres.rank())), max_live_(max_live) {
    tab_.assign(width_, -1);
    rep_.push_back(0);
    alive_ = 1;
  }

  // nullopt signals that the live-coset budget was exceeded (possibly
  // infinite index).
  std::optional<CosetTable> run(PresentationPtr pres_ptr,
                                std::vector<Word> const& subgens) {
    for (auto const& w : subgens)
      if (!scan_until_stable(0, w)) return std::nullopt;
    for (int kappa = 0; kappa < n_alloc(); ++kappa) {
      if (rep_[kappa] != kappa) continue;  // dead
      for (auto const& r : pres_.relators()) {
        if (!scan_until_stable(kappa, r)) return std::nullopt;
        if (rep_[kappa] != kappa) break;  // merged away; survivor is smaller
      }
      if (rep_[kappa] != kappa) continue;
      for (int col = 0; col < width_; ++col)
        if (at(kappa, col) == -1) {
          int b = define(kappa, col);
          if (b < 0) return std::nullopt;
        }
    }
    return extract(std::move(pres_ptr));
  }

 private:
  int n_alloc() const { return static_cast<int>(rep_.size()); }
  std::int32_t& at(int c, int col) { return tab_[c * width_ + col]; }

  int rep(int k) {
    while (rep_[k] != k) k = rep_[k] = rep_[rep_[k]];
    return k;
  }

  // -1 when the coset budget is exhausted. The budget counts allocations,
  // which grow monotonically, so enumeration always terminates.
  int define(int a, int col) {
    if (n_alloc() >= max_live_) return -1;
    int b = n_alloc();
    tab_.resize(tab_.size() + width_, -1);
    rep_.push_back(b);
    ++alive_;
    at(a, col) = b;
    at(b, col ^ 1) = a;
    return b;
  }

  void merge(int k, int l) {
    k = rep(k);
    l = rep(l);
    if (k == l) return;
    if (k > l) std::swap(k, l);  // smallest index survives; 0 never dies
    rep_[l] = k;
    --alive_;
    dead_.push_back(l);
  }

  void process_coincidences() {
    while (!dead_.empty()) {
      int e = dead_.front();
      dead_.pop_front();
      for (int col = 0; col < width_; ++col) {
        int f = at(e, col);
        if (f == -1) continue;
        at(e, col) = -1;
        if (at(f, col ^ 1) == e) at(f, col ^ 1) = -1;
        int mu = rep(e), nu = rep(f);
        if (at(mu, col) != -1)
          merge(nu, at(mu, col));
        else if (at(nu, col ^ 1) != -1)
          merge(mu, at(nu, col ^ 1));
        else {
          at(mu, col) = nu;
          at(nu, col ^ 1) = mu;
        }
      }
    }
  }

  enum class Scan { kDone, kCoincidence, kOverflow };

  // Scans w from coset a, filling gaps with new cosets and forcing the final
  // closure a -w-> a. Restarts after coincidences until the scan is clean.
  bool scan_until_stable(int a, Word const& w) {
    for (;;) {
      a = rep(a);
      Scan s = scan_and_fill(a, w);
      if (s == Scan::kOverflow) return false;
      if (s == Scan::kDone && dead_.empty()) return true;
      process_coincidences();
    }
  }

  Scan scan_and_fill(int a, Word const& w) {
    auto const& letters = w.letters();
    if (letters.empty()) return Scan::kDone;
    int i = 0, j = static_cast<int>(letters.size()) - 1;
    int f = a, b = a;
    for (;;) {
      while (i <= j && at(f, column_of(letters[i])) != -1)
        f = at(f, column_of(letters[i++]));
      if (i > j) {
        if (f != b) {
          merge(f, b);
          return Scan::kCoincidence;
        }
        return Scan::kDone;
      }
      while (j >= i && at(b, column_of(letters[j]) ^ 1) != -1)
        b = at(b, column_of(letters[j--]) ^ 1);
      if (j < i) {  // scans met with an inconsistent overlap
        merge(f, b);
        return Scan::kCoincidence;
      }
      if (j == i) {  // deduction closes the gap
        at(f, column_of(letters[i])) = b;
        at(b, column_of(letters[i]) ^ 1) = f;
        return Scan::kDone;
      }
      if (define(f, column_of(letters[i])) < 0) return Scan::kOverflow;
    }
  }

  std::optional<CosetTable> extract(PresentationPtr pres_ptr) {
    std::vector<int> live;
    std::vector<int> newlabel(n_alloc(), -1);
    for (int c = 0; c < n_alloc(); ++c)
      if (rep_[c] == c) {
        newlabel[c] = static_cast<int>(live.size());
        live.push_back(c);
      }
    int n = static_cast<int>(live.size());
    std::vector<std::int32_t> tab(n * width_);
    for (int c = 0; c < n; ++c)
      for (int col = 0; col < width_; ++col)
        tab[c * width_ + col] = newlabel[rep(at(live[c], col))];
    CosetTable packed(std::move(pres_ptr), n, std::move(tab));
    return canonicalize(packed);
  }

  Presentation const& pres_;
  int width_;
  int max_live_;
  std::vector<std::int32_t> tab_;
  std::vector<std::int32_t> rep_;
  std::deque<int> dead_;
  int alive_;
};

}  // namespace detail

/// Coset enumeration for H = <subgens> in the given presentation. Returns
/// the canonical table of the coset action, or nullopt when more than
/// max_cosets cosets would be live at once (possibly infinite index).
inline std::optional<CosetTable> todd_coxeter(PresentationPtr pres,
                                              std::vector<Word> const& subgens,
                                              int max_cosets = 1 << 16) {
  if (max_cosets < 1) max_cosets = 1;
  for (auto const& w : subgens) require_word_fits(w, *pres);
  detail::ToddCoxeter tc(*pres, max_cosets);
  return tc.run(pres, subgens);
}

inline std::optional<CosetTable> todd_coxeter(Presentation const& pres,
                                              std::vector<Word> const& subgens,
                                              int max_cosets = 1 << 16) {
  return todd_coxeter(std::make_shared<const Presentation>(pres), subgens, max_cosets);
}

}  // namespace chab
