#pragma once

#include "sepbody/directional.hpp"
#include "sepbody/geometry.hpp"

#include <utility>
#include <vector>

namespace sepbody {

/// K[phi, delta] for a full-dimensional body K.
struct SeparationQuery {
  VPolytope body;
  DirectionalDistribution phi;
  double delta = 0.0;
};

struct PsiResult {
  double value = 0.0;
  Vector minimizer;
};

/// Precomputed atom data for repeated queries against one (K, phi). The
/// programs below are solved in coordinates centred at the vertex centroid
/// of K, and only a working subset of the atoms is kept in the program;
/// atoms violated at the current optimum are added until none remain, so
/// the returned optimum is that of the full program.
class SeparationMeasure {
 public:
  SeparationMeasure(VPolytope body, DirectionalDistribution phi);

  const VPolytope& body() const { return body_; }
  const DirectionalDistribution& phi() const { return phi_; }
  const Vector& center() const { return center_; }
  /// h(K, u_j) at the expanded atoms.
  const Eigen::VectorXd& supports() const { return h_; }

  /// m(K,x) = 2 sum_j w_j (<x,u_j> - h(K,u_j))_+.
  double m(const Vector& x) const;
  /// min of m over the hyperplane.
  PsiResult psi(const Hyperplane& h) const;
  bool contains(const Vector& x, double delta) const;

  /// max <x,u> subject to m(K,x) <= delta, by linear programming.
  double support(const Vector& u, double delta) const;
  /// Same value for u in supp phi, by bisection on tau in psi(H(u,tau)) = delta.
  double support_bisection(const Vector& u, double delta) const;
  /// Point o + t v with m = delta, for o with m(o) = 0.
  Vector boundary_ray(const Vector& origin, const Vector& direction, double delta) const;
  HPolytope k_phi() const;

 private:
  std::vector<Eigen::Index> initial_set(const Eigen::VectorXd& score, std::size_t extra) const;

  VPolytope body_;
  DirectionalDistribution phi_;
  Vector center_;
  Eigen::MatrixXd u_;    // d x 2A expanded atoms
  Eigen::VectorXd w_;    // expanded weights
  Eigen::VectorXd h_;    // h(K, u_j)
  Eigen::VectorXd b_;    // h(K - c, u_j)
  std::vector<Eigen::Index> basis_;
};

double m_value(const VPolytope& body, const DirectionalDistribution& phi, const Vector& x);
PsiResult psi_value(const Hyperplane& h, const VPolytope& body, const DirectionalDistribution& phi);
bool membership(const SeparationQuery& q, const Vector& x);
double support_sepbody(const SeparationQuery& q, const Vector& u);
/// Requires u (up to scaling) to be an atom of phi; throws InvalidArgument otherwise.
double support_sepbody_bisection(const SeparationQuery& q, const Vector& u);
Vector boundary_ray(const SeparationQuery& q, const Vector& origin, const Vector& direction);
HPolytope k_phi(const VPolytope& body, const DirectionalDistribution& phi);

/// Vertices of a planar K touched by the two support lines through x. The
/// boundary chain of K facing x runs counter-clockwise from `first` to `second`.
struct TangentPair {
  Vector first;
  Vector second;
  /// Length of that chain.
  double chain_length = 0.0;
};
TangentPair tangent_vertices(const VPolytope& body, const Vector& x);

/// In the region of x, the boundary of K[sigma, delta] is an arc of the
/// ellipse with foci p, q and |y-p| + |y-q| = axis_sum.
struct EllipseArc {
  Vector p;
  Vector q;
  double axis_sum = 0.0;
};
EllipseArc ellipse_params(const VPolytope& body, const Vector& x, double delta,
                          const DirectionalDistribution& phi);

struct VolumeOptions {
  /// Boundary points for the planar sweep.
  int rays = 4096;
  /// Columns per axis for the 3D grid.
  int grid = 160;
};

/// V(K[phi, delta]) for d in {2, 3}.
double sepbody_volume(const SeparationQuery& q, const VolumeOptions& options = {});
/// 2 sum_j w_j h(K[phi,delta], u_j) over the expanded atoms of `quad`.
/// Supports are evaluated on `threads` workers (0: hardware concurrency).
double sepbody_mean_width(const SeparationQuery& q, const DirectionalDistribution& quad,
                          unsigned threads = 1);

/// The quadrature used for mean widths: phi itself when it is a sigma rule,
/// otherwise sigma of order 360 (d = 2) or 100 (d = 3).
DirectionalDistribution width_quadrature(const DirectionalDistribution& phi);

}  // namespace sepbody
