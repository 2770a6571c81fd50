#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace sepbody {

using Vector = Eigen::VectorXd;

class DirectionalDistribution;

/// Unit-norm tolerance for normals and atoms.
inline constexpr double kUnitTolerance = 1e-12;
/// Tolerance for incidence predicates (point on hyperplane, vertex dedup).
inline constexpr double kGeometricTolerance = 1e-9;

/// Hyperplane H(u, tau) = {x : <x,u> = tau} with unit normal u.
struct Hyperplane {
  Vector u;
  double tau = 0.0;

  Hyperplane() = default;
  /// Normalizes `normal`; tau is scaled accordingly.
  Hyperplane(Vector normal, double offset);

  /// H(u,tau) and H(-u,-tau) describe the same set; the canonical form has
  /// the first nonzero coordinate of u positive.
  Hyperplane canonical() const;
  bool same_as(const Hyperplane& other, double tol = kGeometricTolerance) const;
};

enum class Orientation { LessEqual, GreaterEqual };

/// Closed halfspace {<x,u> <= tau} or {<x,u> >= tau}.
struct Halfspace {
  Vector u;
  double tau = 0.0;
  Orientation orientation = Orientation::LessEqual;

  Halfspace() = default;
  Halfspace(Vector normal, double offset, Orientation o = Orientation::LessEqual);

  bool contains(const Vector& x, double tol = kGeometricTolerance) const;
  /// Same set written as {<x,v> <= t}.
  Halfspace as_upper() const;
};

/// Convex body given as the convex hull of a finite vertex list.
class VPolytope {
 public:
  VPolytope() = default;
  /// Throws InvalidBody on an empty list, mixed dimensions, d < 2 or
  /// non-finite coordinates.
  explicit VPolytope(std::vector<Vector> vertices);
  /// Additionally requires the affine hull to be all of R^d.
  static VPolytope full_dimensional(std::vector<Vector> vertices);

  std::size_t dim() const { return dim_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  /// Vertices as columns of a d x N matrix.
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Vector centroid() const;
  bool is_full_dimensional(double tol = kGeometricTolerance) const;
  double diameter() const;

  VPolytope translated(const Vector& t) const;
  VPolytope scaled(double s) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Vector> vertices_;
  Eigen::MatrixXd matrix_;
};

/// Intersection of halfspaces.
struct HPolytope {
  std::vector<Halfspace> halfspaces;
  bool bounded = false;

  std::size_t dim() const;
  bool contains(const Vector& x, double tol = kGeometricTolerance) const;
};

/// h(K,u) = max_v <v,u>.
double support(const VPolytope& body, const Vector& u);
/// h(conv(K u {x}), u).
double support_with_point(const VPolytope& body, const Vector& x, const Vector& u);
/// Whether H weakly (or strictly) separates K and x.
bool separates(const Hyperplane& h, const VPolytope& body, const Vector& x,
               bool strict = false);

struct IntersectionResult {
  VPolytope polytope;
  bool window_active = false;
};

/// Vertex form of the intersection of `halfspaces` with a polytope
/// circumscribed about the ball of radius `radius` around `center`. d in {2,3}.
/// Throws EmptyCell if the intersection has no interior.
IntersectionResult halfspace_intersection(const std::vector<Halfspace>& halfspaces,
                                          double radius, const Vector& center);
IntersectionResult halfspace_intersection(const std::vector<Halfspace>& halfspaces,
                                          double radius);

/// Facet normals of the circumscribed window polytope used above.
std::vector<Vector> window_normals(std::size_t dim);
std::vector<Halfspace> window_halfspaces(std::size_t dim, double radius,
                                         const Vector& center);

/// Lebesgue measure for d in {2,3}; 0 for degenerate input.
double volume(const VPolytope& p);
/// Perimeter of a planar polytope.
double perimeter(const VPolytope& p);
/// 2 * sum_i w_i h(P,u_i) over the mirrored atoms of a quadrature of sigma.
double mean_width(const VPolytope& p, const DirectionalDistribution& quad);

/// max <x,u> over the intersection. Throws UnboundedDirection / EmptyCell.
double lp_support(const HPolytope& p, const Vector& u);

/// Convenience for literals in tests and tools.
Vector vec(std::initializer_list<double> coords);

}  // namespace sepbody
