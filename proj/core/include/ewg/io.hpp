#ifndef EWG_IO_HPP
#define EWG_IO_HPP

#include <ostream>
#include <string>
#include <vector>

#include "ewg/linalg.hpp"

namespace ewg {

/// Shortest round-trippable decimal rendering (printf %.17g trimmed).
/// Used everywhere a double lands in a CSV or JSON file so that repeated runs
/// are byte identical.
std::string fmt_double(double x);

std::string fmt_vec(const SmallVec& v, char sep = ',');

/// Writes one CSV row, formatting doubles with fmt_double.
void csv_row(std::ostream& os, const std::vector<std::string>& cells);

/// Parses "a,b,c" into a SmallVec.
SmallVec parse_vec(const std::string& text);

}  // namespace ewg

#endif
