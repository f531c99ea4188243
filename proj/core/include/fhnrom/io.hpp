#pragma once

#include <string>
#include <vector>

#include "fhnrom/deim.hpp"
#include "fhnrom/dg_space.hpp"

namespace fhnrom {

/// Binary matrix file layout (little-endian):
///   bytes 0-7   magic "FHNMAT01"
///   uint64      rows
///   uint64      cols
///   uint64      column stride (>= rows; values per stored column)
///   float64     cols * stride values, column-major
inline constexpr char kMatrixMagic[8] = {'F', 'H', 'N', 'M', 'A', 'T', '0', '1'};

void write_matrix(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix(const std::string& path);

/// One index per line under the header "index".
void write_index_csv(const std::string& path, const IndexList& indices);
IndexList read_index_csv(const std::string& path);

/// "mode,sigma" rows, 1-based mode index.
void write_spectrum_csv(const std::string& path, const Vector& singular_values);

}  // namespace fhnrom
