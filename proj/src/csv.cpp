#include "addbo/csv.hpp"

#include "addbo/error.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <vector>

namespace addbo {

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

ObservationSet read_observations_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split(line);
  }
  if (header.empty()) throw ParseError("empty data file", std::max(line_no, 1));
  if (header.size() < 2) throw ParseError("need at least one x column and a y column", line_no);
  const int dim = static_cast<int>(header.size()) - 1;
  for (int v = 0; v < dim; ++v) {
    if (header[v] != "x_" + std::to_string(v + 1)) throw ParseError("header must read x_1,...,x_D,y", line_no);
  }
  if (header.back() != "y") throw ParseError("last column must be named y", line_no);

  ObservationSet obs(dim);
  Eigen::VectorXd x(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != dim + 1) {
      throw ParseError("expected " + std::to_string(dim + 1) + " columns, got " + std::to_string(cells.size()), line_no);
    }
    double y = 0.0;
    for (int c = 0; c <= dim; ++c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + cells[c] + "'", line_no);
      }
      if (cells[c].find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v)) {
        throw ParseError("not a finite number: '" + cells[c] + "'", line_no);
      }
      if (c < dim) {
        x[c] = v;
      } else {
        y = v;
      }
    }
    obs.add(x, y);
  }
  if (obs.size() == 0) throw ParseError("data file has no rows", line_no);
  return obs;
}

void write_observations_csv(std::ostream& out, const ObservationSet& obs) {
  for (int v = 0; v < obs.dim(); ++v) out << "x_" << v + 1 << ',';
  out << "y\n";
  for (Eigen::Index r = 0; r < obs.size(); ++r) {
    for (int v = 0; v < obs.dim(); ++v) out << format_real(obs.points(r, v)) << ',';
    out << format_real(obs.values[r]) << '\n';
  }
}

}  // namespace addbo
