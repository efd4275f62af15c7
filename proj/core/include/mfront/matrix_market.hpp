#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mfront/fem.hpp"

namespace mfront::io {

/// Coordinate matrix as read from a Matrix Market file. Symmetric files are
/// expanded so both triangles are present.
struct CoordinateMatrix {
  Index rows = 0;
  Index cols = 0;
  bool symmetric = false;
  std::vector<SparseEntry> entries;
};

/// "coordinate real symmetric", lower triangle only, 1-based indices.
void write_symmetric(std::ostream& out, const GlobalSystem& system);

/// "coordinate real general".
void write_general(std::ostream& out, Index rows, Index cols,
                   std::span<const SparseEntry> entries);

CoordinateMatrix read_matrix_market(std::istream& in);

/// One value per line, 17 significant digits.
void write_vector(std::ostream& out, std::span<const double> values);
std::vector<double> read_vector(std::istream& in);

}  // namespace mfront::io
