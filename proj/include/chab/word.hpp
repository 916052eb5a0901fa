#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chab/error.hpp"

namespace chab {

// A letter is a signed generator reference: +k stands for generator k-1,
// -k for its inverse. 0 is never a letter.
using Letter = std::int32_t;

inline Letter inverse(Letter l) { return -l; }

// Column index of a letter in a 2m-column action table: generator columns
// come in pairs g, g^-1 in alphabet order.
inline int column_of(Letter l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; }

inline Letter letter_of_column(int col) {
  return col % 2 == 0 ? Letter(col / 2 + 1) : Letter(-(col / 2 + 1));
}

/// Ordered list of distinct generator names. Generator index = position.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw err::empty_alphabet();
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j])
          throw Error("DuplicateGenerator",
                      "generator '" + names_[i] + "' declared twice");
  }

  std::size_t size() const { return names_.size(); }
  std::string const& name(std::size_t i) const { return names_.at(i); }
  std::vector<std::string> const& names() const { return names_; }

  // -1 when the name is not declared.
  int index_of(std::string const& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  friend bool operator==(Alphabet const& a, Alphabet const& b) {
    return a.names_ == b.names_;
  }
  friend bool operator!=(Alphabet const& a, Alphabet const& b) { return !(a == b); }

 private:
  std::vector<std::string> names_;
};

/// Freely reduced word over a generator alphabet. The empty word is the
/// identity. Constructors reduce eagerly, so every Word is reduced.
class Word {
 public:
  Word() = default;

  explicit Word(std::vector<Letter> raw) : letters_(reduce_letters(std::move(raw))) {}

  static Word from_reduced(std::vector<Letter> letters) {
    Word w;
    w.letters_ = std::move(letters);
    return w;
  }

  std::vector<Letter> const& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& l : out) l = -l;
    return from_reduced(std::move(out));  // reversal of a reduced word is reduced
  }

  // Largest generator index referenced (1-based), 0 for the empty word.
  int max_generator() const {
    int m = 0;
    for (Letter l : letters_) m = std::max(m, l > 0 ? l : -l);
    return m;
  }

  friend Word operator*(Word const& u, Word const& v) {
    std::vector<Letter> raw;
    raw.reserve(u.size() + v.size());
    raw.insert(raw.end(), u.letters_.begin(), u.letters_.end());
    raw.insert(raw.end(), v.letters_.begin(), v.letters_.end());
    return Word(std::move(raw));
  }

  Word pow(long long k) const {
    Word base = k < 0 ? inverse() : *this;
    long long reps = k < 0 ? -k : k;
    Word acc;
    for (long long i = 0; i < reps; ++i) acc = acc * base;
    return acc;
  }

  friend bool operator==(Word const& a, Word const& b) {
    return a.letters_ == b.letters_;
  }
  friend bool operator!=(Word const& a, Word const& b) { return !(a == b); }
  friend bool operator<(Word const& a, Word const& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.letters_ < b.letters_;
  }

  static std::vector<Letter> reduce_letters(std::vector<Letter> raw) {
    std::vector<Letter> out;
    out.reserve(raw.size());
    for (Letter l : raw) {
      if (l == 0) throw err::index_out_of_range(0);
      if (!out.empty() && out.back() == -l)
        out.pop_back();
      else
        out.push_back(l);
    }
    return out;
  }

 private:
  std::vector<Letter> letters_;
};

inline Word reduce(std::vector<Letter> raw, std::size_t alphabet_size) {
  for (Letter l : raw) {
    int idx = l > 0 ? l : -l;
    if (idx < 1 || static_cast<std::size_t>(idx) > alphabet_size)
      throw err::index_out_of_range(idx);
  }
  return Word(std::move(raw));
}

inline Word multiply(Word const& u, Word const& v) { return u * v; }
inline Word invert(Word const& u) { return u.inverse(); }

/// A finitely presented group <S | R>. Relators are stored reduced; an empty
/// relator list gives a free group.
class Presentation {
 public:
  Presentation() = default;

  Presentation(Alphabet alphabet, std::vector<Word> relators)
      : alphabet_(std::move(alphabet)), relators_(std::move(relators)) {
    for (auto& r : relators_)
      if (r.max_generator() > static_cast<int>(alphabet_.size()))
        throw err::index_out_of_range(r.max_generator());
  }

  Alphabet const& alphabet() const { return alphabet_; }
  std::vector<Word> const& relators() const { return relators_; }
  std::size_t rank() const { return alphabet_.size(); }
  bool is_free() const { return relators_.empty(); }

  Word generator(std::size_t i) const {
    if (i >= alphabet_.size()) throw err::index_out_of_range(static_cast<int>(i) + 1);
    return Word::from_reduced({static_cast<Letter>(i + 1)});
  }

  friend bool operator==(Presentation const& a, Presentation const& b) {
    return a.alphabet_ == b.alphabet_ && a.relators_ == b.relators_;
  }
  friend bool operator!=(Presentation const& a, Presentation const& b) {
    return !(a == b);
  }

 private:
  Alphabet alphabet_;
  std::vector<Word> relators_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

inline void require_same_presentation(Presentation const& a, Presentation const& b) {
  if (a != b) throw err::alphabet_mismatch();
}

inline void require_word_fits(Word const& w, Presentation const& p) {
  if (w.max_generator() > static_cast<int>(p.rank()))
    throw err::index_out_of_range(w.max_generator());
}

/// Canonical text of a word: letters joined by '*', inverses as '^-1',
/// identity as '1'. No power folding, so the form is unique.
inline std::string to_text(Word const& w, Alphabet const& alphabet) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Letter l = w.letters()[i];
    int idx = (l > 0 ? l : -l) - 1;
    if (idx >= static_cast<int>(alphabet.size())) throw err::index_out_of_range(idx + 1);
    if (i) out += '*';
    out += alphabet.name(static_cast<std::size_t>(idx));
    if (l < 0) out += "^-1";
  }
  return out;
}

/// Canonical text of a presentation: `<g1,g2,...| r1, r2, ...>`.
inline std::string to_text(Presentation const& p) {
  std::string out = "<";
  for (std::size_t i = 0; i < p.alphabet().size(); ++i) {
    if (i) out += ',';
    out += p.alphabet().name(i);
  }
  out += '|';
  for (std::size_t i = 0; i < p.relators().size(); ++i) {
    out += i ? ", " : " ";
    out += to_text(p.relators()[i], p.alphabet());
  }
  out += '>';
  return out;
}

}  // namespace chab
