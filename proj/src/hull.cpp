#include "sepbody/hull.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace sepbody {

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = tol * std::max(1.0, scale * scale);

  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= eps) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Eigen::Vector3d Hull3D::normal(const std::array<int, 3>& t) const {
  const Eigen::Vector3d n = (points[t[1]] - points[t[0]]).cross(points[t[2]] - points[t[0]]);
  return n.normalized();
}

double Hull3D::area(const std::array<int, 3>& t) const {
  return 0.5 * (points[t[1]] - points[t[0]]).cross(points[t[2]] - points[t[0]]).norm();
}

namespace {

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d n;  // unnormalized outward normal
  double offset;      // n . p for p on the face
};

Face make_face(const std::vector<Eigen::Vector3d>& pts, int a, int b, int c) {
  Face f{{a, b, c}, (pts[b] - pts[a]).cross(pts[c] - pts[a]), 0.0};
  f.n.normalize();
  f.offset = f.n.dot(pts[a]);
  return f;
}

}  // namespace

Hull3D convex_hull_3d(const std::vector<Eigen::Vector3d>& input, double tol) {
  Hull3D out;
  out.points = input;
  const auto& pts = out.points;
  const int np = static_cast<int>(pts.size());
  if (np < 4) return out;

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = tol * std::max(1.0, scale);

  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < np; ++i)
    if (pts[i].x() < pts[i0].x()) i0 = i;
  int i1 = i0;
  double best = 0.0;
  for (int i = 0; i < np; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  if (best <= eps) return out;
  const Eigen::Vector3d dir = (pts[i1] - pts[i0]) / best;
  int i2 = i0;
  best = 0.0;
  for (int i = 0; i < np; ++i) {
    const double d = (pts[i] - pts[i0]).cross(dir).norm();
    if (d > best) best = d, i2 = i;
  }
  if (best <= eps) return out;
  const Eigen::Vector3d pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = i0;
  best = 0.0;
  for (int i = 0; i < np; ++i) {
    const double d = std::abs(pn.dot(pts[i] - pts[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) return out;

  std::vector<Face> faces;
  if (pn.dot(pts[i3] - pts[i0]) > 0) std::swap(i1, i2);
  faces.push_back(make_face(pts, i0, i1, i2));
  faces.push_back(make_face(pts, i0, i3, i1));
  faces.push_back(make_face(pts, i1, i3, i2));
  faces.push_back(make_face(pts, i2, i3, i0));

  std::vector<char> visible;
  std::set<std::pair<int, int>> vis_edges;
  for (int p = 0; p < np; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.assign(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].n.dot(pts[p]) - faces[f].offset > eps) {
        visible[f] = 1;
        any = true;
      }
    }
    if (!any) continue;
    vis_edges.clear();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) vis_edges.emplace(v[e], v[(e + 1) % 3]);
    }
    std::vector<Face> next;
    next.reserve(faces.size() + 8);
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (!visible[f]) next.push_back(faces[f]);
    for (const auto& [a, b] : vis_edges) {
      if (vis_edges.count({b, a}) == 0) next.push_back(make_face(pts, a, b, p));
    }
    faces = std::move(next);
  }

  out.triangles.reserve(faces.size());
  for (const auto& f : faces) out.triangles.push_back(f.v);
  return out;
}

}  // namespace sepbody
