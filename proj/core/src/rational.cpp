#include "campana/rational.hpp"

#include <stdexcept>

namespace campana {

namespace {
std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

BigInt parse_int(const std::string& s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
  for (std::size_t k = i; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9') throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
  return BigInt(s[0] == '+' ? s.substr(1) : s);
}
}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(trim(text), text));
  const BigInt num = parse_int(trim(text.substr(0, slash)), text);
  const BigInt den = parse_int(trim(text.substr(slash + 1)), text);
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& r) { return r.str(); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt ceil(const Rational& r) {
  const BigInt n = numerator(r), d = denominator(r);
  BigInt q = n / d;
  if (q * d < n) ++q;
  return q;
}

}  // namespace campana
