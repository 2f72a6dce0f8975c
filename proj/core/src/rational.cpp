#include "sigmalab/rational.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace sigmalab {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  const auto slash = body.find('/');
  const std::string_view num = body.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
  if (!all_digits(num) || (slash != std::string_view::npos && !all_digits(den))) {
    throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
  }
  if (slash != std::string_view::npos && std::all_of(den.begin(), den.end(), [](char c) { return c == '0'; })) {
    throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  }
  std::string canonical(text.front() == '+' ? text.substr(1) : text);
  Rational value(canonical, 10);
  value.canonicalize();
  return value;
}

std::string to_string(const Rational& value) { return value.get_str(10); }

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace sigmalab
