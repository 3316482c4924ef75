#include "ewg/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace ewg {

std::string fmt_double(double x) {
  // Find the shortest precision that round-trips, capped at %.17g.
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_vec(const SmallVec& v, char sep) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += fmt_double(v[i]);
  }
  return out;
}

void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

SmallVec parse_vec(const std::string& text) {
  SmallVec out(0);
  std::stringstream ss(text);
  std::string item;
  int n = 0;
  SmallVec tmp(SmallVec::kCapacity);
  while (std::getline(ss, item, ',')) {
    if (n >= SmallVec::kCapacity) throw std::invalid_argument("vector literal too long: " + text);
    std::size_t pos = 0;
    double v = std::stod(item, &pos);
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) throw std::invalid_argument("malformed vector literal: " + text);
    tmp[n++] = v;
  }
  if (n == 0) throw std::invalid_argument("empty vector literal");
  SmallVec v(n);
  for (int i = 0; i < n; ++i) v[i] = tmp[i];
  return v;
}

}  // namespace ewg
