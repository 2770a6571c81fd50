#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace sepbody {

/// Counter-clockwise hull without collinear points (Andrew's monotone chain).
/// Degenerate inputs give one or two points.
std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> points,
                                            double tol = 1e-12);

struct Hull3D {
  std::vector<Eigen::Vector3d> points;
  /// Triangles as indices into `points`, counter-clockwise seen from outside.
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  Eigen::Vector3d normal(const std::array<int, 3>& t) const;  // unit, outward
  double area(const std::array<int, 3>& t) const;
};

/// Incremental (beneath-beyond) hull. Points within `tol` of a facet plane
/// are treated as coplanar and dropped. An empty triangle list means the
/// input is not full-dimensional.
Hull3D convex_hull_3d(const std::vector<Eigen::Vector3d>& points, double tol = 1e-10);

}  // namespace sepbody
