#include "abil/geometry.hpp"

#include <stdexcept>

namespace abil {

Rational rational_from_string(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class v;
  if (v.set_str(text, 10) != 0) {
    throw std::invalid_argument("malformed rational literal: " + text);
  }
  if (v.get_den() == 0) {
    throw std::invalid_argument("zero denominator in rational literal: " + text);
  }
  v.canonicalize();
  return v;
}

std::string rational_to_string(const Rational& v) {
  return v.get_str();
}

}  // namespace abil
