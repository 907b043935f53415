#include "bmrep_cli/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"

namespace bmrep::cli {

namespace {

bool parse_double(std::string_view s, double& v) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

PathContext read_path_csv(std::istream& in) {
  std::vector<std::pair<double, double>> knots;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    double t = 0.0, v = 0.0;
    if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), t) ||
        !parse_double(std::string_view(line).substr(comma + 1), v)) {
      if (lineno == 1) continue;  // header
      throw DomainError("path csv line " + std::to_string(lineno) + " is not 'time,value'");
    }
    knots.emplace_back(t, v);
  }
  if (knots.empty()) throw DomainError("path csv has no rows");
  std::sort(knots.begin(), knots.end());
  if (knots.front().first != 0.0) knots.insert(knots.begin(), {0.0, 0.0});
  std::vector<double> times, values;
  for (const auto& [t, v] : knots) {
    times.push_back(t);
    values.push_back(v);
  }
  return PathContext(std::move(times), std::move(values));
}

PathContext read_path_csv_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw DomainError("cannot open path file '" + file + "'");
  return read_path_csv(in);
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t j = 0; j < t.header.size(); ++j) out << (j ? "," : "") << t.header[j];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << (j ? "," : "");
      // integer-valued index columns print without exponent noise
      if (j == 0 && t.header[0] == "n")
        out << static_cast<long long>(row[j]);
      else
        out << format_exact(row[j]);
    }
    out << '\n';
  }
}

void write_table(std::ostream& out, const Table& t) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(t.header);
  for (const auto& row : t.rows) {
    std::vector<std::string> r;
    for (double v : row) r.push_back(format_number(v));
    cells.push_back(std::move(r));
  }
  std::vector<std::size_t> width(t.header.size(), 0);
  for (const auto& r : cells)
    for (std::size_t j = 0; j < r.size() && j < width.size(); ++j) width[j] = std::max(width[j], r[j].size());
  for (const auto& r : cells) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out << "  ";
      out << std::string(width[j] - r[j].size(), ' ') << r[j];
    }
    out << '\n';
  }
}

}  // namespace bmrep::cli
