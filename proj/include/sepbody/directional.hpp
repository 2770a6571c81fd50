#pragma once

#include "sepbody/geometry.hpp"
#include "sepbody/random.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sepbody {

/// Even probability measure on the unit sphere, stored as half-atoms: atom i
/// stands for the pair {u_i, -u_i}, each direction carrying weight w_i, so
/// that sum_i 2 w_i = 1 and evenness holds by construction.
class DirectionalDistribution {
 public:
  enum class Kind { Discrete, Sigma, FacetMeasure };

  std::size_t dim() const { return static_cast<std::size_t>(directions_.rows()); }
  /// Number of stored half-atoms.
  std::size_t size() const { return static_cast<std::size_t>(directions_.cols()); }
  /// d x size() matrix of stored directions.
  const Eigen::MatrixXd& directions() const { return directions_; }
  /// Weight of each of the two directions +-u_i.
  const Eigen::VectorXd& weights() const { return weights_; }
  Vector atom(std::size_t i) const { return directions_.col(static_cast<Eigen::Index>(i)); }

  /// All 2 * size() directions: columns [U, -U].
  Eigen::MatrixXd expanded_directions() const;
  Eigen::VectorXd expanded_weights() const;

  Kind kind() const { return kind_; }
  /// Quadrature order for Kind::Sigma, 0 otherwise.
  int order() const { return order_; }
  /// Preset-style descriptor, e.g. "sigma2d:360" or "discrete[4]".
  const std::string& label() const { return label_; }

  /// Index of the expanded atom equal to the normalized `u`, or -1.
  long find_expanded(const Vector& u, double tol = 1e-12) const;

 private:
  friend DirectionalDistribution make_distribution(Eigen::MatrixXd, Eigen::VectorXd, Kind, int,
                                                   std::string);
  Eigen::MatrixXd directions_;
  Eigen::VectorXd weights_;
  Kind kind_ = Kind::Discrete;
  int order_ = 0;
  std::string label_;
};

/// Validating constructor shared by the factories below: normalizes the
/// weights, and rejects non-unit atoms, non-positive weights and atom sets
/// that fail to span R^d.
DirectionalDistribution make_distribution(Eigen::MatrixXd directions, Eigen::VectorXd weights,
                                          DirectionalDistribution::Kind kind, int order,
                                          std::string label);

/// Symmetrized, normalized discrete measure from (direction, weight) pairs.
DirectionalDistribution make_discrete(const std::vector<std::pair<Vector, double>>& pairs);

/// Quadrature approximation of the normalized spherical Lebesgue measure.
///  d = 2: `order` equally spaced directions on the half circle.
///  d = 3: Gauss-Legendre in the polar cosine times uniform azimuth, with
///         p = round(sqrt(order / 4)) nodes on the upper hemisphere and 4p
///         azimuths, i.e. 4p^2 stored atoms (about `order`).
DirectionalDistribution make_sigma(std::size_t dim, int order);

/// Normalized surface area measure of a centrally symmetric polytope.
DirectionalDistribution make_facet_measure(const VPolytope& body);

/// The measure with atoms at the coordinate axes, weight 1/(2d) each.
DirectionalDistribution make_axes(std::size_t dim);

/// Phi(K) = sum over mirrored atoms of w_i h(K, u_i).
double phi_functional(const VPolytope& body, const DirectionalDistribution& phi);

/// h(K, u) at every expanded atom (length 2 * size()).
Eigen::VectorXd atom_supports(const VPolytope& body, const DirectionalDistribution& phi);

/// Draws a stored-atom index with probability proportional to w_i * tilt_i.
std::size_t sample_tilted_direction(const DirectionalDistribution& phi,
                                    std::span<const double> tilt, Rng& rng);

/// Precomputed cumulative table for repeated tilted draws.
class TiltedSampler {
 public:
  TiltedSampler(const DirectionalDistribution& phi, std::span<const double> tilt);
  std::size_t operator()(Rng& rng) const;
  double total() const { return total_; }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace sepbody
