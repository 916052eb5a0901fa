#pragma once

#include <numeric>
#include <string>

#include "chab/error.hpp"

namespace chab {

/// Exact rational arithmetic for Folner ratios. Always normalized with a
/// positive denominator; all comparisons are exact.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;

  Rational(long long n, long long d) {
    if (d == 0) throw Error("DivisionByZero", "rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
  }

  static Rational parse(std::string const& text) {
    auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return Rational(std::stoll(text), 1);
      return Rational(std::stoll(text.substr(0, slash)),
                      std::stoll(text.substr(slash + 1)));
    } catch (std::exception const&) {
      throw Error("BadRational", "cannot parse rational '" + text + "'");
    }
  }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(Rational const& a, Rational const& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(Rational const& a, Rational const& b) { return !(a == b); }
  friend bool operator<(Rational const& a, Rational const& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator<=(Rational const& a, Rational const& b) { return !(b < a); }
  friend bool operator>(Rational const& a, Rational const& b) { return b < a; }
  friend bool operator>=(Rational const& a, Rational const& b) { return !(a < b); }
};

}  // namespace chab
