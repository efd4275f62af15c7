#include "mfront/matrix_market.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mfront::io {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void write_symmetric(std::ostream& out, const GlobalSystem& system) {
  std::size_t lower = 0;
  for (Index r = 0; r < system.n_dof(); ++r) {
    for (Index c : system.row_cols(r)) lower += c <= r ? 1 : 0;
  }
  fmt::print(out, "%%MatrixMarket matrix coordinate real symmetric\n");
  fmt::print(out, "{} {} {}\n", system.n_dof(), system.n_dof(), lower);
  for (Index r = 0; r < system.n_dof(); ++r) {
    const auto cols = system.row_cols(r);
    const auto vals = system.row_values(r);
    for (std::size_t k = 0; k < cols.size() && cols[k] <= r; ++k) {
      fmt::print(out, "{} {} {:.17g}\n", r + 1, cols[k] + 1, vals[k]);
    }
  }
}

void write_general(std::ostream& out, Index rows, Index cols,
                   std::span<const SparseEntry> entries) {
  fmt::print(out, "%%MatrixMarket matrix coordinate real general\n");
  fmt::print(out, "{} {} {}\n", rows, cols, entries.size());
  for (const auto& e : entries) {
    fmt::print(out, "{} {} {:.17g}\n", e.row + 1, e.col + 1, e.value);
  }
}

CoordinateMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty Matrix Market stream");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lowercase(object) != "matrix" ||
      lowercase(format) != "coordinate") {
    throw Error("unsupported Matrix Market banner: " + line);
  }
  field = lowercase(field);
  symmetry = lowercase(symmetry);
  if (field != "real" && field != "double" && field != "integer") {
    throw Error("unsupported Matrix Market field: " + field);
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw Error("unsupported Matrix Market symmetry: " + symmetry);
  }

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  CoordinateMatrix m;
  m.symmetric = symmetry == "symmetric";
  std::size_t count = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> m.rows >> m.cols >> count)) {
      throw Error("malformed Matrix Market size line: " + line);
    }
  }
  m.entries.reserve(m.symmetric ? 2 * count : count);
  for (std::size_t k = 0; k < count; ++k) {
    Index r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v)) throw Error("truncated Matrix Market data");
    if (r < 1 || r > m.rows || c < 1 || c > m.cols) {
      throw Error("Matrix Market entry out of range");
    }
    m.entries.push_back({r - 1, c - 1, v});
    if (m.symmetric && r != c) m.entries.push_back({c - 1, r - 1, v});
  }
  return m;
}

void write_vector(std::ostream& out, std::span<const double> values) {
  for (double v : values) fmt::print(out, "{:.17g}\n", v);
}

std::vector<double> read_vector(std::istream& in) {
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw Error("malformed vector file");
  return values;
}

}  // namespace mfront::io
