#pragma once

#include "sepbody/geometry.hpp"
#include "sepbody/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace fixtures {

using sepbody::Vector;
using sepbody::VPolytope;
using sepbody::vec;

inline VPolytope square() { return VPolytope({vec({-1, -1}), vec({1, -1}), vec({1, 1}), vec({-1, 1})}); }

inline VPolytope square(double side) { return square().scaled(side / 2.0); }

inline VPolytope triangle() { return VPolytope({vec({0, 0}), vec({1, 0}), vec({0, 1})}); }

inline VPolytope cube() {
  std::vector<Vector> v;
  for (int i = 0; i < 8; ++i) v.push_back(vec({i & 1 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 4 ? 1.0 : -1.0}));
  return VPolytope(v);
}

inline VPolytope regular_polygon(int k, double r = 1.0) {
  std::vector<Vector> v;
  for (int i = 0; i < k; ++i) {
    const double a = 2.0 * std::numbers::pi * i / k;
    v.push_back(vec({r * std::cos(a), r * std::sin(a)}));
  }
  return VPolytope(v);
}

/// Vertices on a latitude-longitude net of the unit sphere.
inline VPolytope sphere_polytope(int lat, int lon) {
  std::vector<Vector> v{vec({0, 0, 1}), vec({0, 0, -1})};
  for (int i = 1; i < lat; ++i) {
    const double t = std::numbers::pi * i / lat;
    for (int j = 0; j < lon; ++j) {
      const double p = 2.0 * std::numbers::pi * j / lon;
      v.push_back(vec({std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)}));
    }
  }
  return VPolytope(v);
}

inline double uniform(sepbody::Rng& rng, double a, double b) { return a + (b - a) * rng.uniform(); }

inline Vector random_point(sepbody::Rng& rng, std::size_t d, double a, double b) {
  Vector x(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform(rng, a, b);
  return x;
}

inline Vector random_unit(sepbody::Rng& rng, std::size_t d) {
  for (;;) {
    Vector x = random_point(rng, d, -1.0, 1.0);
    const double n = x.norm();
    if (n > 1e-3 && n <= 1.0) return x / n;
  }
}

/// Hull of `k` random points in [-1,1]^d, retried until full-dimensional.
inline VPolytope random_body(sepbody::Rng& rng, std::size_t d, int k) {
  for (;;) {
    std::vector<Vector> v;
    for (int i = 0; i < k; ++i) v.push_back(random_point(rng, d, -1.0, 1.0));
    VPolytope p(v);
    if (p.is_full_dimensional(1e-3)) return p;
  }
}

/// Random point of conv(vertices) by Dirichlet-like weights.
inline Vector random_inside(sepbody::Rng& rng, const VPolytope& k) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(k.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(rng.uniform_open());
  return k.matrix() * (w / w.sum());
}

}  // namespace fixtures
