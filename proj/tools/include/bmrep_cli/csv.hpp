#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bmrep/path.hpp"

namespace bmrep::cli {

// Reads a path from CSV with columns time,value (header optional).
PathContext read_path_csv(std::istream& in);
PathContext read_path_csv_file(const std::string& file);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Header row, 17 significant digits, '\n' line ends.
void write_csv(std::ostream& out, const Table& t);
// Right-aligned columns with shortest round-trip numbers.
void write_table(std::ostream& out, const Table& t);

}  // namespace bmrep::cli
