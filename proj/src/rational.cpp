#include "relu/rational.hpp"

#include <cctype>

namespace relu {

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) return false;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_integer_token(text)) {
      throw std::invalid_argument("malformed rational: '" + text + "'");
    }
    return Rat(Int(text, 10));
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  if (!is_integer_token(num) || !is_integer_token(den)) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
  Int p(num, 10), q(den, 10);
  if (q == 0) {
    throw std::invalid_argument("zero denominator in rational: '" + text + "'");
  }
  Rat r(p, q);
  r.canonicalize();
  return r;
}

std::string rat_to_string(const Rat& value) { return value.get_str(); }

}  // namespace relu
