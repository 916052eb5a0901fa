#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chab {

// Every domain failure carries a stable machine-readable code; the CLI maps
// codes one-to-one onto structured error output.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string const& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  std::string const& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace err {

inline Error syntax(std::size_t pos, std::string const& expected) {
  return Error("SyntaxError", "syntax error at position " + std::to_string(pos)
                                  + ": expected " + expected);
}

inline Error unknown_generator(std::string const& name) {
  return Error("UnknownGenerator", "unknown generator '" + name + "'");
}

inline Error empty_alphabet() {
  return Error("EmptyAlphabet", "alphabet must contain at least one generator");
}

inline Error index_out_of_range(int index) {
  return Error("IndexOutOfRange",
               "letter refers to generator index " + std::to_string(index)
                   + " outside the alphabet");
}

inline Error alphabet_mismatch() {
  return Error("AlphabetMismatch", "operands belong to different presentations");
}

inline Error resource_budget_exceeded(std::string const& what) {
  return Error("ResourceBudgetExceeded", what);
}

inline Error separation_impossible() {
  return Error("SeparationImpossible",
               "element lies in the subgroup; no separating overgroup exists");
}

inline Error not_finite_index() {
  return Error("NotFiniteIndex", "operation requires a finite-index subgroup");
}

inline Error window_exhausted(std::string const& what) {
  return Error("WindowExhausted", what);
}

inline Error empty_set() { return Error("EmptySet", "point set must be nonempty"); }

inline Error not_a_bijection() {
  return Error("NotABijection", "relabeling map is not a bijection of the window");
}

inline Error window_mismatch(std::string const& what) {
  return Error("WindowMismatch", what);
}

inline Error conjugate_duplicate() {
  return Error("ConjugateDuplicate",
               "two finite-index handles in the list are conjugate");
}

inline Error invalid_classification() {
  return Error("InvalidClassification",
               "a finite-index handle cannot be classified Sigma: its normalizer "
               "index is finite");
}

inline Error insufficient_fixed_points(std::size_t needed, std::size_t have) {
  return Error("InsufficientFixedPoints",
               "construction needs " + std::to_string(needed)
                   + " free fixed points but only " + std::to_string(have)
                   + " are available");
}

inline Error no_folner_in_orbit(std::string const& what) {
  return Error("NoFolnerInOrbit", what);
}

inline Error unsupported_format(std::string const& fmt) {
  return Error("UnsupportedFormat", "unsupported output format '" + fmt + "'");
}

inline Error generator_name_clash(std::string const& name) {
  return Error("GeneratorNameClash",
               "free product factors share the generator name '" + name + "'");
}

}  // namespace err
}  // namespace chab
