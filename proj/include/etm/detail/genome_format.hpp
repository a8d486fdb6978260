#pragma once

#include <charconv>
#include <string>
#include <variant>

#include "etm/genome.hpp"

namespace etm {

// Shortest round-trip decimal form, '.' decimal point, locale-independent.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string genome_to_string(const Genome& g) {
  if (const auto* b = std::get_if<BitString>(&g)) {
    std::string s;
    s.reserve(b->bits.size());
    for (auto bit : b->bits) s.push_back(bit ? '1' : '0');
    return s;
  }
  if (const auto* r = std::get_if<RealVector>(&g)) {
    std::string s;
    for (std::size_t i = 0; i < r->values.size(); ++i) {
      if (i) s.push_back(',');
      s += format_double(r->values[i]);
    }
    return s;
  }
  const auto& p = std::get<Permutation>(g);
  std::string s;
  for (std::size_t i = 0; i < p.order.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(p.order[i]);
  }
  return s;
}

} // namespace etm
