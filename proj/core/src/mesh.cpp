#include "fhnrom/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <Eigen/LU>

#include "fhnrom/error.hpp"

namespace fhnrom {

namespace {

using GridPoint = std::pair<std::int64_t, std::int64_t>;

// Vertices live on an integer lattice during refinement; doubling the lattice
// before each pass keeps every midpoint exact.
struct LatticeMesh {
  std::vector<GridPoint> points;
  std::vector<std::array<int, 3>> triangles;
};

LatticeMesh refine(const LatticeMesh& coarse) {
  LatticeMesh fine;
  std::map<GridPoint, int> index;
  auto intern = [&](GridPoint p) {
    auto [it, inserted] = index.try_emplace(p, static_cast<int>(fine.points.size()));
    if (inserted) fine.points.push_back(p);
    return it->second;
  };
  for (const auto& p : coarse.points) intern({2 * p.first, 2 * p.second});

  fine.triangles.reserve(coarse.triangles.size() * 4);
  for (const auto& t : coarse.triangles) {
    std::array<GridPoint, 3> c;
    for (int i = 0; i < 3; ++i) {
      const auto& p = coarse.points[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])];
      c[static_cast<std::size_t>(i)] = {2 * p.first, 2 * p.second};
    }
    auto mid = [&](int a, int b) {
      const auto& pa = c[static_cast<std::size_t>(a)];
      const auto& pb = c[static_cast<std::size_t>(b)];
      return intern({(pa.first + pb.first) / 2, (pa.second + pb.second) / 2});
    };
    const int v0 = intern(c[0]);
    const int v1 = intern(c[1]);
    const int v2 = intern(c[2]);
    const int m01 = mid(0, 1);
    const int m12 = mid(1, 2);
    const int m20 = mid(2, 0);
    fine.triangles.push_back({v0, m01, m20});
    fine.triangles.push_back({m01, v1, m12});
    fine.triangles.push_back({m20, m12, v2});
    fine.triangles.push_back({m01, m12, m20});
  }
  return fine;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

Mesh Mesh::square(double half_width, int refinements) {
  if (!(half_width > 0.0)) throw Error("square mesh: half_width must be positive");
  if (refinements < 0) throw Error("square mesh: refinements must be non-negative");

  LatticeMesh lattice;
  lattice.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  lattice.triangles = {{0, 1, 2}, {0, 2, 3}};
  for (int r = 0; r < refinements; ++r) lattice = refine(lattice);

  Mesh mesh;
  mesh.half_width_ = half_width;
  mesh.refinements_ = refinements;
  const double scale = 2.0 * half_width / static_cast<double>(std::int64_t{1} << refinements);
  mesh.vertices_.reserve(lattice.points.size());
  for (const auto& [i, j] : lattice.points) {
    mesh.vertices_.emplace_back(-half_width + scale * static_cast<double>(i),
                                -half_width + scale * static_cast<double>(j));
  }
  mesh.elements_ = std::move(lattice.triangles);
  mesh.finalize_geometry();
  return mesh;
}

Point2 Mesh::centroid(int element) const {
  return (vertex(element, 0) + vertex(element, 1) + vertex(element, 2)) / 3.0;
}

void Mesh::finalize_geometry() {
  const std::size_t n_el = elements_.size();
  areas_.resize(n_el);
  maps_.resize(n_el);
  for (std::size_t e = 0; e < n_el; ++e) {
    const int ei = static_cast<int>(e);
    const Point2 a = vertex(ei, 0);
    const Point2 b = vertex(ei, 1);
    const Point2 c = vertex(ei, 2);
    AffineMap& map = maps_[e];
    map.origin = a;
    map.jacobian.col(0) = b - a;
    map.jacobian.col(1) = c - a;
    map.det = map.jacobian.determinant();
    map.inverse_jacobian = map.jacobian.inverse();
    areas_[e] = 0.5 * map.det;
  }

  // First element to see an edge becomes its `left` owner.
  struct Seen {
    int element;
    int edge;
    bool paired;
    std::size_t face;
  };
  std::unordered_map<std::uint64_t, Seen> seen;
  seen.reserve(n_el * 3);
  std::vector<std::uint64_t> order;
  order.reserve(n_el * 3 / 2 + 2);
  interior_faces_.clear();
  for (std::size_t e = 0; e < n_el; ++e) {
    for (int k = 0; k < 3; ++k) {
      const auto& tri = elements_[e];
      const int a = tri[static_cast<std::size_t>(k)];
      const int b = tri[static_cast<std::size_t>((k + 1) % 3)];
      const std::uint64_t key = edge_key(a, b);
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, Seen{static_cast<int>(e), k, false, 0});
        order.push_back(key);
        continue;
      }
      if (it->second.paired) {
        throw Error("mesh: edge shared by more than two elements");
      }
      it->second.paired = true;
      const int left = it->second.element;
      const int left_edge = it->second.edge;
      const Point2 pa = vertex(left, left_edge);
      const Point2 pb = vertex(left, (left_edge + 1) % 3);
      const Point2 d = pb - pa;
      InteriorFace face;
      face.left = left;
      face.right = static_cast<int>(e);
      face.left_edge = left_edge;
      face.right_edge = k;
      face.length = d.norm();
      face.normal = Point2(d.y(), -d.x()) / face.length;
      it->second.face = interior_faces_.size();
      interior_faces_.push_back(face);
    }
  }

  boundary_faces_.clear();
  for (std::uint64_t key : order) {
    const Seen& s = seen.at(key);
    if (s.paired) continue;
    const Point2 pa = vertex(s.element, s.edge);
    const Point2 pb = vertex(s.element, (s.edge + 1) % 3);
    const Point2 d = pb - pa;
    BoundaryFace face;
    face.element = s.element;
    face.edge = s.edge;
    face.length = d.norm();
    face.normal = Point2(d.y(), -d.x()) / face.length;
    boundary_faces_.push_back(face);
  }
}

Mesh build_square_mesh(double half_width, int refinements) {
  return Mesh::square(half_width, refinements);
}

FaceConnectivityReport face_connectivity_check(const Mesh& mesh) {
  FaceConnectivityReport report;
  report.interior = mesh.interior_faces().size();
  report.boundary = mesh.boundary_faces().size();
  auto defect = [&](const std::string& msg) { report.defects.push_back(msg); };

  const std::size_t n_el = mesh.num_elements();
  for (std::size_t e = 0; e < n_el; ++e) {
    if (!(mesh.element_areas()[e] > 0.0)) {
      defect("element " + std::to_string(e) + " has non-positive area");
    }
  }

  std::vector<int> uses(n_el * 3, 0);
  auto mark = [&](int element, int edge, const char* kind) {
    if (element < 0 || static_cast<std::size_t>(element) >= n_el || edge < 0 || edge > 2) {
      defect(std::string(kind) + " face references invalid element/edge");
      return;
    }
    int& count = uses[static_cast<std::size_t>(element) * 3 + static_cast<std::size_t>(edge)];
    if (++count > 1) {
      defect("element " + std::to_string(element) + " edge " + std::to_string(edge) +
             " appears in more than one face");
    }
  };

  constexpr double unit_tol = 1e-14;
  const double hw = mesh.half_width();
  for (std::size_t f = 0; f < mesh.interior_faces().size(); ++f) {
    const auto& face = mesh.interior_faces()[f];
    mark(face.left, face.left_edge, "interior");
    mark(face.right, face.right_edge, "interior");
    if (face.left == face.right) {
      defect("interior face " + std::to_string(f) + " has identical neighbours");
      continue;
    }
    if (std::abs(face.normal.norm() - 1.0) > unit_tol) {
      defect("interior face " + std::to_string(f) + " normal is not unit length");
    }
    const Point2 towards = mesh.centroid(face.right) - mesh.centroid(face.left);
    if (!(face.normal.dot(towards) > 0.0)) {
      defect("interior face " + std::to_string(f) + " normal does not point left->right");
    }
  }
  for (std::size_t f = 0; f < mesh.boundary_faces().size(); ++f) {
    const auto& face = mesh.boundary_faces()[f];
    mark(face.element, face.edge, "boundary");
    if (face.element < 0 || static_cast<std::size_t>(face.element) >= n_el) continue;
    if (std::abs(face.normal.norm() - 1.0) > unit_tol) {
      defect("boundary face " + std::to_string(f) + " normal is not unit length");
    }
    const Point2 a = mesh.vertex(face.element, face.edge);
    const Point2 b = mesh.vertex(face.element, (face.edge + 1) % 3);
    const Point2 mid = 0.5 * (a + b);
    if (!(face.normal.dot(mid - mesh.centroid(face.element)) > 0.0)) {
      defect("boundary face " + std::to_string(f) + " normal is not outward");
    }
    const double tol = 1e-12 * hw;
    const bool on_boundary = std::abs(std::abs(mid.x()) - hw) < tol || std::abs(std::abs(mid.y()) - hw) < tol;
    if (!on_boundary) {
      defect("boundary face " + std::to_string(f) + " is not on the domain boundary");
    }
  }
  for (std::size_t i = 0; i < uses.size(); ++i) {
    if (uses[i] == 0) {
      defect("element " + std::to_string(i / 3) + " edge " + std::to_string(i % 3) + " has no face");
    }
  }
  if (3 * n_el != 2 * report.interior + report.boundary) {
    defect("face count identity 3*N_el = 2*I + B violated");
  }
  return report;
}

void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<double>& cell_data,
               const std::string& cell_data_name) {
  if (!cell_data.empty() && cell_data.size() != mesh.num_elements()) {
    throw DimensionError("write_vtk: cell data size does not match element count");
  }
  out << "# vtk DataFile Version 3.0\n";
  out << "fhnrom dG mesh\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << " 0\n";
  const std::size_t n_el = mesh.num_elements();
  out << "CELLS " << n_el << ' ' << 4 * n_el << '\n';
  for (const auto& t : mesh.elements()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << n_el << '\n';
  for (std::size_t e = 0; e < n_el; ++e) out << "5\n";
  if (!cell_data.empty()) {
    out << "CELL_DATA " << n_el << '\n';
    out << "SCALARS " << cell_data_name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : cell_data) out << v << '\n';
  }
}

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<double>& cell_data,
               const std::string& cell_data_name) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write_vtk(file, mesh, cell_data, cell_data_name);
  if (!file) throw IoError("failed writing " + path);
}

}  // namespace fhnrom
