#include "fhnrom/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fhnrom/error.hpp"

namespace fhnrom {

static_assert(std::endian::native == std::endian::little, "matrix files are written in host order");

void write_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const std::uint64_t header[3] = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()),
                                   static_cast<std::uint64_t>(m.rows())};
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!out) throw IoError("failed writing " + path);
}

DenseMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  std::uint64_t header[3];
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, kMatrixMagic, sizeof(magic)) != 0) throw IoError(path + ": not a matrix file");
  const auto rows = static_cast<Eigen::Index>(header[0]);
  const auto cols = static_cast<Eigen::Index>(header[1]);
  const auto stride = static_cast<Eigen::Index>(header[2]);
  if (stride < rows) throw IoError(path + ": column stride smaller than row count");
  DenseMatrix m(rows, cols);
  std::vector<double> column(static_cast<std::size_t>(stride));
  for (Eigen::Index c = 0; c < cols; ++c) {
    in.read(reinterpret_cast<char*>(column.data()), static_cast<std::streamsize>(column.size() * sizeof(double)));
    if (!in) throw IoError(path + ": truncated matrix data");
    m.col(c) = Eigen::Map<const Eigen::VectorXd>(column.data(), rows);
  }
  return m;
}

void write_index_csv(const std::string& path, const IndexList& indices) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "index\n";
  for (const auto i : indices) out << i << '\n';
  if (!out) throw IoError("failed writing " + path);
}

IndexList read_index_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "index") throw IoError(path + ": missing 'index' header");
  IndexList out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(static_cast<Eigen::Index>(std::stoll(line)));
    } catch (const std::exception&) {
      throw IoError(path + ": malformed index '" + line + "'");
    }
  }
  return out;
}

void write_spectrum_csv(const std::string& path, const Vector& singular_values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "mode,sigma\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) out << i + 1 << ',' << singular_values(i) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace fhnrom
