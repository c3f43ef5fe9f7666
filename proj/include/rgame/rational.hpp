#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgame {

using Rational = mpq_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accepts "p", "p/q", "-p/q" and finite decimals such as "0.125".
// Decimals are converted exactly. Throws Error on malformed input.
Rational parseRational(std::string_view text);

// Canonical text: "p" for integers, otherwise "p/q" in lowest terms.
std::string toString(const Rational& r);

// Exact binary expansion of a finite double.
Rational fromDouble(double d);

inline double toDouble(const Rational& r) { return r.get_d(); }

}  // namespace rgame
