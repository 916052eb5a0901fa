#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "chab/error.hpp"
#include "chab/word.hpp"

namespace chab {
namespace detail {

// Recursive-descent parser for the presentation / word syntax:
//
//   presentation := "<" ident ("," ident)* "|" [relator ("," relator)*] ">"
//   relator      := word ["=" word]          (lhs=rhs desugars to lhs*rhs^-1)
//   word         := "1" | factor (["*"] factor)*
//   factor       := atom ["^" int]
//   atom         := ident | "1" | "(" word ")"
//
// Whitespace separates tokens and is otherwise ignored. Identifiers are
// ASCII [A-Za-z_][A-Za-z0-9_]*.
class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)) {}

  Presentation presentation() {
    expect('<');
    std::vector<std::string> names;
    names.push_back(ident("generator name"));
    while (peek() == ',') {
      advance();
      names.push_back(ident("generator name"));
    }
    Alphabet alphabet(std::move(names));
    expect('|');
    std::vector<Word> relators;
    if (peek() != '>') {
      relators.push_back(relator(alphabet));
      while (peek() == ',') {
        advance();
        relators.push_back(relator(alphabet));
      }
    }
    expect('>');
    skip_ws();
    if (pos_ != text_.size()) throw err::syntax(pos_, "end of input");
    return Presentation(std::move(alphabet), std::move(relators));
  }

  Word word(Alphabet const& alphabet, bool must_consume_all) {
    Word w = word_expr(alphabet);
    if (must_consume_all) {
      skip_ws();
      if (pos_ != text_.size()) throw err::syntax(pos_, "end of input");
    }
    return w;
  }

 private:
  Word relator(Alphabet const& alphabet) {
    Word lhs = word_expr(alphabet);
    if (peek() == '=') {
      advance();
      Word rhs = word_expr(alphabet);
      return lhs * rhs.inverse();
    }
    return lhs;
  }

  Word word_expr(Alphabet const& alphabet) {
    Word w;
    bool first = true;
    for (;;) {
      char c = peek();
      if (c == '*') {
        if (first) throw err::syntax(pos_, "a word before '*'");
        advance();
        c = peek();
      }
      if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '('
            || c == '1')) {
        if (first) throw err::syntax(pos_, "a word");
        return w;
      }
      w = w * factor(alphabet);
      first = false;
    }
  }

  Word factor(Alphabet const& alphabet) {
    Word base = atom(alphabet);
    if (peek() == '^') {
      advance();
      return base.pow(integer());
    }
    return base;
  }

  Word atom(Alphabet const& alphabet) {
    char c = peek();
    if (c == '(') {
      advance();
      Word inner = word_expr(alphabet);
      expect(')');
      return inner;
    }
    if (c == '1') {
      advance();
      return Word();
    }
    std::string name = ident("generator name");
    int idx = alphabet.index_of(name);
    if (idx < 0) throw err::unknown_generator(name);
    return Word::from_reduced({static_cast<Letter>(idx + 1)});
  }

  long long integer() {
    skip_ws();
    std::size_t start = pos_;
    bool neg = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      neg = true;
      ++pos_;
    }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw err::syntax(start, "an integer exponent");
    long long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1'000'000) throw err::syntax(start, "a smaller exponent");
      ++pos_;
    }
    return neg ? -value : value;
  }

  std::string ident(char const* what) {
    skip_ws();
    if (pos_ >= text_.size()
        || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      throw err::syntax(pos_, what);
    std::size_t start = pos_;
    while (pos_ < text_.size()
           && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void advance() { ++pos_; }

  void expect(char c) {
    if (peek() != c) throw err::syntax(pos_, std::string("'") + c + "'");
    ++pos_;
  }

  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Presentation parse_presentation(std::string const& text) {
  return detail::Parser(text).presentation();
}

inline Word parse_word(std::string const& text, Alphabet const& alphabet) {
  return detail::Parser(text).word(alphabet, true);
}

/// Comma-separated list of words, e.g. a subgroup generator list. An empty
/// or all-whitespace string yields the empty list.
inline std::vector<Word> parse_words(std::string const& text, Alphabet const& alphabet) {
  std::vector<Word> out;
  std::size_t start = 0;
  bool any = false;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      std::string piece = text.substr(start, i - start);
      bool blank = piece.find_first_not_of(" \t\r\n") == std::string::npos;
      if (!blank) {
        out.push_back(parse_word(piece, alphabet));
        any = true;
      } else if (any || i < text.size()) {
        if (!(i == text.size() && !any))  // allow a fully empty list
          throw err::syntax(start, "a word between commas");
      }
      start = i + 1;
    }
  }
  return out;
}

}  // namespace chab
