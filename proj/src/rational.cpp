#include "rgame/rational.hpp"

#include <cctype>
#include <cmath>

namespace rgame {

namespace {

bool allDigits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parseRational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational r;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!allDigits(num) || !allDigits(den))
      throw Error("malformed rational '" + std::string(text) + "'");
    mpz_class d{std::string(den)};
    if (d == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    r = Rational(mpz_class(std::string(num)), d);
    r.canonicalize();
  } else if (dot != std::string_view::npos) {
    auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !allDigits(ip)) ||
        (!fp.empty() && !allDigits(fp)))
      throw Error("malformed decimal '" + std::string(text) + "'");
    mpz_class scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    mpz_class whole(ip.empty() ? std::string("0") : std::string(ip));
    mpz_class frac(fp.empty() ? std::string("0") : std::string(fp));
    r = Rational(whole * scale + frac, scale);
    r.canonicalize();
  } else {
    if (!allDigits(s)) throw Error("malformed rational '" + std::string(text) + "'");
    r = Rational(mpz_class(std::string(s)));
  }
  return negative ? Rational(-r) : r;
}

std::string toString(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational fromDouble(double d) {
  if (!std::isfinite(d)) throw Error("non-finite double");
  Rational r(d);  // mpq_set_d is exact
  r.canonicalize();
  return r;
}

}  // namespace rgame
