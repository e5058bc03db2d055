#pragma once

#include <string>
#include <vector>

#include "psvm/preprocess.hpp"

namespace psvm {

// Minimal CSV support: comma separator, double-quote quoting for cells
// containing commas/quotes/newlines, first row is the header.

RawTable read_csv(const std::string& path);
RawTable parse_csv(const std::string& text);

void write_csv(const std::string& path, const RawTable& table);

// Shortest round-trip decimal form of a double (bit-exact on re-read).
std::string format_double(double v);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace psvm
