#include "nofinetune/rational.hpp"

#include <cctype>
#include <cmath>

#include "nofinetune/error.hpp"

namespace nft {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  std::string owned(s);
  if (!owned.empty() && owned[0] == '+') owned.erase(0, 1);
  return mpz_class(owned, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den)) {
      throw ParseError("malformed rational '" + std::string(text) + "'");
    }
    mpz_class d = parse_integer(den);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Rational q(parse_integer(num), d);
    q.canonicalize();
    return q;
  }
  if (is_integer_literal(text)) return Rational(parse_integer(text));

  // Decimal literal: sign, digits, '.', digits.
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = text.substr(dot + 1);
  bool negative = false;
  if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
    negative = whole[0] == '-';
    whole.remove_prefix(1);
  }
  auto digits_only = [](std::string_view s) {
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  if ((whole.empty() && frac.empty()) || !digits_only(whole) || !digits_only(frac)) {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  std::string digits = std::string(whole) + std::string(frac);
  mpz_class num(digits.empty() ? std::string("0") : digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  Rational q(num, den);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

Rational from_double(double v) {
  if (!std::isfinite(v)) throw ParseError("non-finite floating-point weight");
  Rational q(v);
  q.canonicalize();
  return q;
}

}  // namespace nft
