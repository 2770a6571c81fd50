#include "sepbody/directional.hpp"

#include "sepbody/error.hpp"
#include "sepbody/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace sepbody {

Eigen::MatrixXd DirectionalDistribution::expanded_directions() const {
  Eigen::MatrixXd out(directions_.rows(), 2 * directions_.cols());
  out << directions_, -directions_;
  return out;
}

Eigen::VectorXd DirectionalDistribution::expanded_weights() const {
  Eigen::VectorXd out(2 * weights_.size());
  out << weights_, weights_;
  return out;
}

long DirectionalDistribution::find_expanded(const Vector& u, double tol) const {
  const double norm = u.norm();
  if (!(norm > 0.0) || static_cast<std::size_t>(u.size()) != dim()) return -1;
  const Vector v = u / norm;
  for (Eigen::Index i = 0; i < directions_.cols(); ++i) {
    if ((directions_.col(i) - v).norm() <= tol) return static_cast<long>(i);
    if ((directions_.col(i) + v).norm() <= tol) return static_cast<long>(i + directions_.cols());
  }
  return -1;
}

DirectionalDistribution make_distribution(Eigen::MatrixXd directions, Eigen::VectorXd weights,
                                          DirectionalDistribution::Kind kind, int order,
                                          std::string label) {
  const auto d = directions.rows();
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 2");
  if (directions.cols() == 0 || weights.size() != directions.cols())
    throw Error(ErrorKind::InvalidArgument, "atom and weight counts differ or are zero");
  for (Eigen::Index i = 0; i < directions.cols(); ++i) {
    if (!(weights(i) > 0.0) || !std::isfinite(weights(i)))
      throw Error(ErrorKind::InvalidArgument, "atom weights must be positive");
    if (std::abs(directions.col(i).norm() - 1.0) > kUnitTolerance)
      throw Error(ErrorKind::InvalidArgument, "atoms must be unit vectors");
  }
  weights /= 2.0 * weights.sum();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(directions);
  const auto& sv = svd.singularValues();
  if (sv.size() < d || sv(d - 1) <= 1e-9 * sv(0))
    throw Error(ErrorKind::GreatSubsphere, "atoms do not span R^" + std::to_string(d));

  DirectionalDistribution out;
  out.directions_ = std::move(directions);
  out.weights_ = std::move(weights);
  out.kind_ = kind;
  out.order_ = order;
  out.label_ = std::move(label);
  return out;
}

namespace {

// First nonzero coordinate positive.
Vector canonical_direction(const Vector& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) > 0.0) return u;
    if (u(i) < 0.0) return -u;
  }
  return u;
}

struct AtomAccumulator {
  std::vector<Vector> dirs;
  std::vector<double> mass;

  void add(const Vector& raw, double w) {
    const double norm = raw.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error(ErrorKind::InvalidArgument, "directions must be finite and nonzero");
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "weights must be positive");
    const Vector u = canonical_direction(raw / norm);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if ((dirs[i] - u).norm() <= kUnitTolerance) {
        mass[i] += w;
        return;
      }
    }
    dirs.push_back(u);
    mass.push_back(w);
  }

  std::pair<Eigen::MatrixXd, Eigen::VectorXd> matrices() const {
    if (dirs.empty()) throw Error(ErrorKind::InvalidArgument, "no atoms given");
    Eigen::MatrixXd m(dirs.front().size(), static_cast<Eigen::Index>(dirs.size()));
    Eigen::VectorXd w(static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (dirs[i].size() != m.rows()) throw Error(ErrorKind::InvalidArgument, "atoms of mixed dimension");
      m.col(static_cast<Eigen::Index>(i)) = dirs[i];
      w(static_cast<Eigen::Index>(i)) = mass[i];
    }
    return {m, w};
  }
};

// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
}

}  // namespace

DirectionalDistribution make_discrete(const std::vector<std::pair<Vector, double>>& pairs) {
  AtomAccumulator acc;
  for (const auto& [u, w] : pairs) acc.add(u, w);
  auto [m, w] = acc.matrices();
  const std::string label = "discrete[" + std::to_string(m.cols()) + "]";
  return make_distribution(std::move(m), std::move(w), DirectionalDistribution::Kind::Discrete, 0, label);
}

DirectionalDistribution make_axes(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return make_distribution(Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Ones(d),
                           DirectionalDistribution::Kind::Discrete, 0, "axes" + std::to_string(dim) + "d");
}

DirectionalDistribution make_sigma(std::size_t dim, int order) {
  if (order < static_cast<int>(2 * dim))
    throw Error(ErrorKind::OrderTooSmall, "quadrature order must be at least 2d");
  const std::string label = "sigma" + std::to_string(dim) + "d:" + std::to_string(order);
  if (dim == 2) {
    Eigen::MatrixXd m(2, order);
    for (int k = 0; k < order; ++k) {
      const double a = std::numbers::pi * k / order;
      m.col(k) << std::cos(a), std::sin(a);
    }
    return make_distribution(std::move(m), Eigen::VectorXd::Ones(order),
                             DirectionalDistribution::Kind::Sigma, order, label);
  }
  if (dim == 3) {
    const int p = std::max(1, static_cast<int>(std::lround(std::sqrt(order / 4.0))));
    const int azimuths = 4 * p;
    std::vector<double> z, gw;
    gauss_legendre(2 * p, z, gw);
    Eigen::MatrixXd m(3, p * azimuths);
    Eigen::VectorXd w(p * azimuths);
    int col = 0;
    for (int k = p; k < 2 * p; ++k) {  // upper hemisphere nodes
      const double zk = z[static_cast<std::size_t>(k)];
      const double r = std::sqrt(std::max(0.0, 1.0 - zk * zk));
      for (int l = 0; l < azimuths; ++l) {
        const double a = 2.0 * std::numbers::pi * l / azimuths;
        m.col(col) << r * std::cos(a), r * std::sin(a), zk;
        w(col) = gw[static_cast<std::size_t>(k)];
        ++col;
      }
    }
    return make_distribution(std::move(m), std::move(w), DirectionalDistribution::Kind::Sigma, order, label);
  }
  throw Error(ErrorKind::InvalidArgument, "sigma quadrature is available for d in {2,3}");
}

DirectionalDistribution make_facet_measure(const VPolytope& body) {
  const std::size_t d = body.dim();
  if (d != 2 && d != 3) throw Error(ErrorKind::InvalidArgument, "facet measure requires d in {2,3}");
  if (!body.is_full_dimensional()) throw Error(ErrorKind::InvalidBody, "body must be full-dimensional");

  // Hull vertices, then the symmetry check about their centroid.
  std::vector<Vector> hull_vertices;
  AtomAccumulator acc;
  if (d == 2) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& v : body.vertices()) pts.emplace_back(v(0), v(1));
    const auto hull = convex_hull_2d(pts);
    for (const auto& p : hull) hull_vertices.push_back(Vector(p));
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Eigen::Vector2d e = hull[(i + 1) % hull.size()] - hull[i];
      acc.add(vec({e.y(), -e.x()}), e.norm());
    }
  } else {
    std::vector<Eigen::Vector3d> pts;
    for (const auto& v : body.vertices()) pts.emplace_back(v(0), v(1), v(2));
    const Hull3D hull = convex_hull_3d(pts);
    std::vector<char> used(hull.points.size(), 0);
    for (const auto& t : hull.triangles) {
      for (int i : t) used[static_cast<std::size_t>(i)] = 1;
      acc.add(Vector(hull.normal(t)), hull.area(t));
    }
    for (std::size_t i = 0; i < used.size(); ++i)
      if (used[i]) hull_vertices.push_back(Vector(hull.points[i]));
  }
  Vector c = Vector::Zero(static_cast<Eigen::Index>(d));
  for (const auto& v : hull_vertices) c += v;
  c /= static_cast<double>(hull_vertices.size());
  const double tol = kGeometricTolerance * std::max(1.0, body.diameter());
  for (const auto& v : hull_vertices) {
    const Vector mirror = 2.0 * c - v;
    const bool found = std::any_of(hull_vertices.begin(), hull_vertices.end(),
                                   [&](const Vector& w) { return (w - mirror).norm() <= tol; });
    if (!found) throw Error(ErrorKind::AsymmetricBody, "vertex set is not symmetric about its centroid");
  }
  // Coplanar triangles of one facet share a normal only up to rounding;
  // merge those within the geometric tolerance.
  AtomAccumulator merged;
  for (std::size_t i = 0; i < acc.dirs.size(); ++i) {
    bool placed = false;
    for (std::size_t j = 0; j < merged.dirs.size(); ++j) {
      if ((merged.dirs[j] - acc.dirs[i]).norm() <= kGeometricTolerance) {
        merged.mass[j] += acc.mass[i];
        placed = true;
        break;
      }
    }
    if (!placed) {
      merged.dirs.push_back(acc.dirs[i]);
      merged.mass.push_back(acc.mass[i]);
    }
  }
  auto [m, w] = merged.matrices();
  return make_distribution(std::move(m), std::move(w), DirectionalDistribution::Kind::FacetMeasure, 0,
                           "facets[" + std::to_string(w.size()) + "]");
}

Eigen::VectorXd atom_supports(const VPolytope& body, const DirectionalDistribution& phi) {
  if (body.dim() != phi.dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  const Eigen::MatrixXd proj = body.matrix().transpose() * phi.directions();
  Eigen::VectorXd h(2 * proj.cols());
  h.head(proj.cols()) = proj.colwise().maxCoeff().transpose();
  h.tail(proj.cols()) = -proj.colwise().minCoeff().transpose();
  return h;
}

double phi_functional(const VPolytope& body, const DirectionalDistribution& phi) {
  if (body.dim() != phi.dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  const Eigen::MatrixXd proj = body.matrix().transpose() * phi.directions();
  const Eigen::VectorXd width = (proj.colwise().maxCoeff() - proj.colwise().minCoeff()).transpose();
  return phi.weights().dot(width);
}

TiltedSampler::TiltedSampler(const DirectionalDistribution& phi, std::span<const double> tilt) {
  if (tilt.size() != phi.size()) throw Error(ErrorKind::InvalidArgument, "one tilt per atom required");
  cumulative_.resize(tilt.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < tilt.size(); ++i) {
    if (!(tilt[i] >= 0.0) || !std::isfinite(tilt[i]))
      throw Error(ErrorKind::InvalidArgument, "tilts must be finite and nonnegative");
    acc += phi.weights()(static_cast<Eigen::Index>(i)) * tilt[i];
    cumulative_[i] = acc;
  }
  total_ = acc;
  if (!(total_ > 0.0)) throw Error(ErrorKind::ZeroTilt, "tilted weights sum to zero");
}

std::size_t TiltedSampler::operator()(Rng& rng) const {
  const double target = rng.uniform() * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

std::size_t sample_tilted_direction(const DirectionalDistribution& phi, std::span<const double> tilt,
                                    Rng& rng) {
  return TiltedSampler(phi, tilt)(rng);
}

}  // namespace sepbody
