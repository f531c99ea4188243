#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fhnrom {

using Point2 = Eigen::Vector2d;

/// Face shared by two elements. The normal points from `left` into `right`.
struct InteriorFace {
  int left = -1;
  int right = -1;
  int left_edge = -1;
  int right_edge = -1;
  Point2 normal = Point2::Zero();
  double length = 0.0;
};

/// Face on the domain boundary, with the outward unit normal.
struct BoundaryFace {
  int element = -1;
  int edge = -1;
  Point2 normal = Point2::Zero();
  double length = 0.0;
};

/// Affine map x = origin + jacobian * xi from the reference triangle
/// (0,0), (1,0), (0,1).
struct AffineMap {
  Point2 origin = Point2::Zero();
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d inverse_jacobian = Eigen::Matrix2d::Identity();
  double det = 1.0;

  Point2 to_physical(const Point2& xi) const { return origin + jacobian * xi; }
  Point2 to_reference(const Point2& x) const { return inverse_jacobian * (x - origin); }
};

/// Conforming triangulation of an axis-aligned square, immutable once built.
///
/// Local edge `i` of an element runs from its vertex `i` to vertex `(i+1)%3`.
/// Elements are counterclockwise.
class Mesh {
 public:
  static Mesh square(double half_width, int refinements);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }
  const std::vector<InteriorFace>& interior_faces() const { return interior_faces_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }
  const std::vector<double>& element_areas() const { return areas_; }
  const std::vector<AffineMap>& affine_maps() const { return maps_; }

  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_vertices() const { return vertices_.size(); }
  double half_width() const { return half_width_; }
  int refinements() const { return refinements_; }

  Point2 vertex(int element, int local) const {
    return vertices_[static_cast<std::size_t>(elements_[static_cast<std::size_t>(element)][static_cast<std::size_t>(local)])];
  }
  Point2 centroid(int element) const;

 private:
  Mesh() = default;
  void finalize_geometry();

  double half_width_ = 0.0;
  int refinements_ = 0;
  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
  std::vector<double> areas_;
  std::vector<AffineMap> maps_;
};

/// Square [-half_width, half_width]^2 split along its main diagonal, then
/// uniformly red-refined `refinements` times.
Mesh build_square_mesh(double half_width, int refinements);

struct FaceConnectivityReport {
  std::size_t interior = 0;
  std::size_t boundary = 0;
  std::vector<std::string> defects;

  bool ok() const { return defects.empty(); }
};

/// Audits the face tables. Never throws; defects are listed in the report.
FaceConnectivityReport face_connectivity_check(const Mesh& mesh);

/// Legacy-VTK ASCII unstructured grid. `cell_data`, when non-empty, must have
/// one value per element and is written as CELL_DATA under `cell_data_name`.
void write_vtk(std::ostream& out, const Mesh& mesh,
               const std::vector<double>& cell_data = {},
               const std::string& cell_data_name = "u");
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<double>& cell_data = {},
               const std::string& cell_data_name = "u");

}  // namespace fhnrom
