#include "sepbody/geometry.hpp"

#include "sepbody/directional.hpp"
#include "sepbody/error.hpp"
#include "sepbody/hull.hpp"
#include "sepbody/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sepbody {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidBody: return "invalid body";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::EmptyCell: return "empty cell";
    case ErrorKind::UnboundedDirection: return "unbounded direction";
    case ErrorKind::GreatSubsphere: return "directions concentrated on a great subsphere";
    case ErrorKind::OrderTooSmall: return "quadrature order too small";
    case ErrorKind::AsymmetricBody: return "body not centrally symmetric";
    case ErrorKind::ZeroTilt: return "all tilts zero";
    case ErrorKind::BracketFailure: return "bracket failure";
    case ErrorKind::SolverFailure: return "solver failure";
    case ErrorKind::PointInBody: return "point lies in the body";
    case ErrorKind::WindowExhausted: return "window regeneration exhausted";
    case ErrorKind::AcceptanceBudget: return "acceptance budget exceeded";
    case ErrorKind::ReplicationFailure: return "replication failed";
    case ErrorKind::DegenerateCell: return "degenerate cell";
  }
  return "error";
}

Vector vec(std::initializer_list<double> coords) {
  Vector v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v(i++) = c;
  return v;
}

// ---------------------------------------------------------------------------
// Hyperplanes and halfspaces

namespace {

Vector unit(const Vector& u, double& norm) {
  norm = u.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorKind::InvalidArgument, "normal vector must be finite and nonzero");
  return u / norm;
}

}  // namespace

Hyperplane::Hyperplane(Vector normal, double offset) {
  double norm = 0.0;
  u = unit(normal, norm);
  tau = offset / norm;
}

Hyperplane Hyperplane::canonical() const {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) > 0.0) return *this;
    if (u(i) < 0.0) {
      Hyperplane h;
      h.u = -u;
      h.tau = -tau;
      return h;
    }
  }
  return *this;
}

bool Hyperplane::same_as(const Hyperplane& other, double tol) const {
  const Hyperplane a = canonical(), b = other.canonical();
  return a.u.size() == b.u.size() && (a.u - b.u).norm() <= tol && std::abs(a.tau - b.tau) <= tol;
}

Halfspace::Halfspace(Vector normal, double offset, Orientation o) : orientation(o) {
  double norm = 0.0;
  u = unit(normal, norm);
  tau = offset / norm;
}

bool Halfspace::contains(const Vector& x, double tol) const {
  const double s = x.dot(u) - tau;
  return orientation == Orientation::LessEqual ? s <= tol : s >= -tol;
}

Halfspace Halfspace::as_upper() const {
  if (orientation == Orientation::LessEqual) return *this;
  Halfspace h;
  h.u = -u;
  h.tau = -tau;
  return h;
}

// ---------------------------------------------------------------------------
// Polytopes

VPolytope::VPolytope(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw Error(ErrorKind::InvalidBody, "empty vertex list");
  dim_ = static_cast<std::size_t>(vertices_.front().size());
  if (dim_ < 2) throw Error(ErrorKind::InvalidBody, "dimension must be at least 2");
  matrix_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(vertices_.size()));
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (static_cast<std::size_t>(vertices_[i].size()) != dim_)
      throw Error(ErrorKind::InvalidBody, "vertices of mixed dimension");
    if (!vertices_[i].allFinite()) throw Error(ErrorKind::InvalidBody, "non-finite vertex coordinate");
    matrix_.col(static_cast<Eigen::Index>(i)) = vertices_[i];
  }
}

VPolytope VPolytope::full_dimensional(std::vector<Vector> vertices) {
  VPolytope p(std::move(vertices));
  if (!p.is_full_dimensional())
    throw Error(ErrorKind::InvalidBody, "body has empty interior (affine hull is not R^d)");
  return p;
}

Vector VPolytope::centroid() const { return matrix_.rowwise().mean(); }

bool VPolytope::is_full_dimensional(double tol) const {
  if (vertices_.size() <= dim_) return false;
  const Eigen::MatrixXd diff = matrix_.colwise() - vertices_.front();
  const double scale = std::max(1.0, diff.cwiseAbs().maxCoeff());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(diff / scale);
  lu.setThreshold(tol);
  return static_cast<std::size_t>(lu.rank()) == dim_;
}

double VPolytope::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j)
      d = std::max(d, (vertices_[i] - vertices_[j]).norm());
  return d;
}

VPolytope VPolytope::translated(const Vector& t) const {
  std::vector<Vector> v(vertices_);
  for (auto& x : v) x += t;
  return VPolytope(std::move(v));
}

VPolytope VPolytope::scaled(double s) const {
  std::vector<Vector> v(vertices_);
  for (auto& x : v) x *= s;
  return VPolytope(std::move(v));
}

std::size_t HPolytope::dim() const {
  return halfspaces.empty() ? 0 : static_cast<std::size_t>(halfspaces.front().u.size());
}

bool HPolytope::contains(const Vector& x, double tol) const {
  return std::all_of(halfspaces.begin(), halfspaces.end(),
                     [&](const Halfspace& h) { return h.contains(x, tol); });
}

// ---------------------------------------------------------------------------
// Support functions

double support(const VPolytope& body, const Vector& u) {
  if (body.size() == 0) throw Error(ErrorKind::InvalidBody, "empty vertex list");
  return (body.matrix().transpose() * u).maxCoeff();
}

double support_with_point(const VPolytope& body, const Vector& x, const Vector& u) {
  return std::max(support(body, u), x.dot(u));
}

bool separates(const Hyperplane& h, const VPolytope& body, const Vector& x, bool strict) {
  const double xu = x.dot(h.u);
  const double hi = support(body, h.u);
  const double lo = -support(body, -h.u);
  if (strict) return (xu > h.tau && h.tau > hi) || (xu < h.tau && h.tau < lo);
  return (xu >= h.tau && h.tau >= hi) || (xu <= h.tau && h.tau <= lo);
}

// ---------------------------------------------------------------------------
// Halfspace intersection

namespace {

constexpr int kWindowTag = -1;
constexpr int kWindowSides2d = 64;

struct Polygon2 {
  std::vector<Eigen::Vector2d> pts;
  std::vector<int> tags;  // tags[i] labels the edge pts[i] -> pts[i+1]
};

bool lex_less(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

bool lex_less(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return a.x() < b.x() || (a.x() == b.x() && (a.y() < b.y() || (a.y() == b.y() && a.z() < b.z())));
}

// Crossing point of segment [a,b] with the plane, computed from the
// lexicographically smaller endpoint so shared edges give identical points.
template <typename P>
P crossing(const P& a, double sa, const P& b, double sb) {
  if (lex_less(b, a)) return crossing(b, sb, a, sa);
  return a + (b - a) * (sa / (sa - sb));
}

void clip(Polygon2& poly, const Eigen::Vector2d& u, double tau, int tag, double eps) {
  const std::size_t n = poly.pts.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = u.dot(poly.pts[i]) - tau;
  if (std::all_of(s.begin(), s.end(), [&](double v) { return v <= eps; })) return;
  Polygon2 out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const auto& cur = poly.pts[i];
    const auto& nxt = poly.pts[j];
    const double sc = s[i], sn = s[j];
    if (sc < -eps) {
      out.pts.push_back(cur);
      out.tags.push_back(poly.tags[i]);
      if (sn > eps) {
        out.pts.push_back(crossing(cur, sc, nxt, sn));
        out.tags.push_back(tag);
      }
    } else if (sc <= eps) {
      out.pts.push_back(cur);
      out.tags.push_back(sn > eps ? tag : poly.tags[i]);
    } else if (sn < -eps) {
      out.pts.push_back(crossing(cur, sc, nxt, sn));
      out.tags.push_back(poly.tags[i]);
    }
  }
  poly = std::move(out);
}

double polygon_area(const std::vector<Eigen::Vector2d>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& q = p[i];
    const auto& r = p[(i + 1) % p.size()];
    a += q.x() * r.y() - r.x() * q.y();
  }
  return 0.5 * a;
}

IntersectionResult intersect_2d(const std::vector<Halfspace>& hs, double radius, const Vector& center) {
  const Eigen::Vector2d c(center(0), center(1));
  Polygon2 poly;
  const double rv = radius / std::cos(std::numbers::pi / kWindowSides2d);
  for (int k = 0; k < kWindowSides2d; ++k) {
    const double a = (2 * k + 1) * std::numbers::pi / kWindowSides2d;
    poly.pts.push_back(c + rv * Eigen::Vector2d(std::cos(a), std::sin(a)));
    poly.tags.push_back(kWindowTag);
  }
  const double eps = kGeometricTolerance * std::max(1.0, radius + c.norm());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const Halfspace h = hs[i].as_upper();
    clip(poly, Eigen::Vector2d(h.u(0), h.u(1)), h.tau, static_cast<int>(i), eps);
    if (poly.pts.size() < 3) throw Error(ErrorKind::EmptyCell, "halfspace intersection is empty");
  }
  // Merge coincident consecutive vertices left by near-degenerate clips.
  Polygon2 clean;
  for (std::size_t i = 0; i < poly.pts.size(); ++i) {
    if (!clean.pts.empty() && (poly.pts[i] - clean.pts.back()).norm() <= eps) {
      clean.tags.back() = poly.tags[i];
      continue;
    }
    clean.pts.push_back(poly.pts[i]);
    clean.tags.push_back(poly.tags[i]);
  }
  while (clean.pts.size() > 1 && (clean.pts.front() - clean.pts.back()).norm() <= eps) {
    clean.pts.pop_back();
    clean.tags.pop_back();
  }
  if (clean.pts.size() < 3 || polygon_area(clean.pts) <= eps * eps)
    throw Error(ErrorKind::EmptyCell, "halfspace intersection has empty interior");

  IntersectionResult res;
  std::vector<Vector> verts;
  verts.reserve(clean.pts.size());
  for (const auto& p : clean.pts) verts.push_back(Vector(p));
  res.polytope = VPolytope(std::move(verts));
  res.window_active = std::find(clean.tags.begin(), clean.tags.end(), kWindowTag) != clean.tags.end();
  return res;
}

struct Face3 {
  std::vector<Eigen::Vector3d> pts;  // counter-clockwise seen from outside
  Eigen::Vector3d normal;
  int tag;
};

void add_unique(std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& p, double eps) {
  for (const auto& q : pts)
    if ((p - q).norm() <= eps) return;
  pts.push_back(p);
}

void clip(std::vector<Face3>& faces, const Eigen::Vector3d& u, double tau, int tag, double eps) {
  std::vector<Face3> out;
  out.reserve(faces.size() + 1);
  std::vector<Eigen::Vector3d> cap;
  bool cut = false;
  for (auto& f : faces) {
    const std::size_t n = f.pts.size();
    std::vector<double> s(n);
    bool all_in = true;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = u.dot(f.pts[i]) - tau;
      if (s[i] > eps) all_in = false;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(s[i]) <= eps) add_unique(cap, f.pts[i], eps);
    if (all_in) {
      out.push_back(std::move(f));
      continue;
    }
    cut = true;
    Face3 g{{}, f.normal, f.tag};
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const double sc = s[i], sn = s[j];
      if (sc <= eps) g.pts.push_back(f.pts[i]);
      if ((sc < -eps && sn > eps) || (sc > eps && sn < -eps)) {
        const Eigen::Vector3d x = crossing(f.pts[i], sc, f.pts[j], sn);
        g.pts.push_back(x);
        add_unique(cap, x, eps);
      }
    }
    if (g.pts.size() >= 3) out.push_back(std::move(g));
  }
  if (cut && cap.size() >= 3) {
    // Order cap vertices counter-clockwise around u.
    Eigen::Vector3d e1 = u.unitOrthogonal();
    Eigen::Vector3d e2 = u.cross(e1);
    Eigen::Vector3d mid = Eigen::Vector3d::Zero();
    for (const auto& p : cap) mid += p;
    mid /= static_cast<double>(cap.size());
    std::vector<Eigen::Vector2d> planar;
    planar.reserve(cap.size());
    for (const auto& p : cap) planar.emplace_back(e1.dot(p - mid), e2.dot(p - mid));
    const auto hull = convex_hull_2d(planar, 1e-14);
    if (hull.size() >= 3) {
      Face3 capf{{}, u, tag};
      for (const auto& q : hull) capf.pts.push_back(mid + q.x() * e1 + q.y() * e2);
      out.push_back(std::move(capf));
    }
  }
  faces = std::move(out);
}

std::vector<Face3> cube_faces(double r, const Eigen::Vector3d& c) {
  std::vector<Face3> faces;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sgn : {-1, 1}) {
      Eigen::Vector3d n = Eigen::Vector3d::Zero();
      n(axis) = sgn;
      const Eigen::Vector3d a = Eigen::Vector3d::Unit((axis + 1) % 3);
      const Eigen::Vector3d b = Eigen::Vector3d::Unit((axis + 2) % 3);
      // a x b = e_axis, so (a, b) is counter-clockwise seen from +e_axis.
      Face3 f{{}, n, kWindowTag};
      const Eigen::Vector3d base = c + r * n;
      std::array<std::pair<int, int>, 4> corners{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
      for (auto [i, j] : corners) f.pts.push_back(base + r * (i * a + j * b));
      if (sgn < 0) std::reverse(f.pts.begin(), f.pts.end());
      faces.push_back(std::move(f));
    }
  }
  return faces;
}

IntersectionResult intersect_3d(const std::vector<Halfspace>& hs, double radius, const Vector& center) {
  const Eigen::Vector3d c(center(0), center(1), center(2));
  const double eps = kGeometricTolerance * std::max(1.0, radius + c.norm());
  auto faces = cube_faces(radius, c);
  for (const auto& n : window_normals(3)) {
    const Eigen::Vector3d u(n(0), n(1), n(2));
    if (u.cwiseAbs().maxCoeff() > 1.0 - 1e-12) continue;  // cube facets already present
    clip(faces, u, radius + u.dot(c), kWindowTag, eps);
  }
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const Halfspace h = hs[i].as_upper();
    clip(faces, Eigen::Vector3d(h.u(0), h.u(1), h.u(2)), h.tau, static_cast<int>(i), eps);
    if (faces.size() < 4) throw Error(ErrorKind::EmptyCell, "halfspace intersection is empty");
  }
  std::vector<Eigen::Vector3d> pts;
  bool window_active = false;
  for (const auto& f : faces) {
    if (f.tag == kWindowTag) window_active = true;
    for (const auto& p : f.pts) add_unique(pts, p, eps);
  }
  if (pts.size() < 4) throw Error(ErrorKind::EmptyCell, "halfspace intersection has empty interior");
  IntersectionResult res;
  std::vector<Vector> verts;
  verts.reserve(pts.size());
  for (const auto& p : pts) verts.push_back(Vector(p));
  res.polytope = VPolytope(std::move(verts));
  res.window_active = window_active;
  return res;
}

}  // namespace

std::vector<Vector> window_normals(std::size_t dim) {
  std::vector<Vector> out;
  if (dim == 2) {
    for (int k = 0; k < kWindowSides2d; ++k) {
      const double a = 2.0 * k * std::numbers::pi / kWindowSides2d;
      out.push_back(vec({std::cos(a), std::sin(a)}));
    }
  } else if (dim == 3) {
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z)
          if (x != 0 || y != 0 || z != 0) out.push_back(vec({double(x), double(y), double(z)}).normalized());
  } else {
    throw Error(ErrorKind::InvalidArgument, "window polytopes exist for d in {2,3} only");
  }
  return out;
}

std::vector<Halfspace> window_halfspaces(std::size_t dim, double radius, const Vector& center) {
  std::vector<Halfspace> out;
  for (const auto& n : window_normals(dim)) out.emplace_back(n, radius + n.dot(center));
  return out;
}

IntersectionResult halfspace_intersection(const std::vector<Halfspace>& hs, double radius,
                                          const Vector& center) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "window radius must be positive");
  const auto d = static_cast<std::size_t>(center.size());
  for (const auto& h : hs)
    if (static_cast<std::size_t>(h.u.size()) != d)
      throw Error(ErrorKind::InvalidArgument, "halfspace dimension mismatch");
  if (d == 2) return intersect_2d(hs, radius, center);
  if (d == 3) return intersect_3d(hs, radius, center);
  throw Error(ErrorKind::InvalidArgument, "halfspace intersection supports d in {2,3}");
}

IntersectionResult halfspace_intersection(const std::vector<Halfspace>& hs, double radius) {
  const std::size_t d = hs.empty() ? 2 : static_cast<std::size_t>(hs.front().u.size());
  return halfspace_intersection(hs, radius, Vector::Zero(static_cast<Eigen::Index>(d)));
}

// ---------------------------------------------------------------------------
// Measures

namespace {

std::vector<Eigen::Vector2d> planar_hull(const VPolytope& p) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(p.size());
  for (const auto& v : p.vertices()) pts.emplace_back(v(0), v(1));
  return convex_hull_2d(std::move(pts));
}

}  // namespace

double volume(const VPolytope& p) {
  if (p.dim() == 2) {
    const auto hull = planar_hull(p);
    return hull.size() < 3 ? 0.0 : std::abs(polygon_area(hull));
  }
  if (p.dim() == 3) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(p.size());
    for (const auto& v : p.vertices()) pts.emplace_back(v(0), v(1), v(2));
    const Hull3D hull = convex_hull_3d(pts);
    if (hull.empty()) return 0.0;
    const Eigen::Vector3d c = p.centroid();
    double vol = 0.0;
    for (const auto& t : hull.triangles) {
      Eigen::Matrix3d m;
      m << hull.points[t[0]] - c, hull.points[t[1]] - c, hull.points[t[2]] - c;
      vol += m.determinant();
    }
    return vol / 6.0;
  }
  throw Error(ErrorKind::InvalidArgument, "volume supports d in {2,3}");
}

double perimeter(const VPolytope& p) {
  if (p.dim() != 2) throw Error(ErrorKind::InvalidArgument, "perimeter requires d = 2");
  const auto hull = planar_hull(p);
  if (hull.size() < 2) return 0.0;
  double len = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) len += (hull[(i + 1) % hull.size()] - hull[i]).norm();
  return len;
}

double mean_width(const VPolytope& p, const DirectionalDistribution& quad) {
  if (quad.dim() != p.dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  return 2.0 * phi_functional(p, quad);
}

double lp_support(const HPolytope& p, const Vector& u) {
  const std::size_t d = static_cast<std::size_t>(u.size());
  lp::Problem prob(p.halfspaces.size(), d);
  for (std::size_t i = 0; i < p.halfspaces.size(); ++i) {
    const Halfspace h = p.halfspaces[i].as_upper();
    if (static_cast<std::size_t>(h.u.size()) != d)
      throw Error(ErrorKind::InvalidArgument, "halfspace dimension mismatch");
    prob.a.row(static_cast<Eigen::Index>(i)) = h.u.transpose();
    prob.b(static_cast<Eigen::Index>(i)) = h.tau;
  }
  prob.objective = u;
  std::fill(prob.free.begin(), prob.free.end(), true);
  const lp::Solution sol = lp::solve(prob);
  if (sol.status == lp::Status::Unbounded)
    throw Error(ErrorKind::UnboundedDirection, "support LP is unbounded");
  if (sol.status == lp::Status::Infeasible) throw Error(ErrorKind::EmptyCell, "support LP is infeasible");
  return sol.value;
}

}  // namespace sepbody
