#include "sepbody/separation.hpp"

#include "parallel.hpp"
#include "sepbody/error.hpp"
#include "sepbody/hull.hpp"
#include "sepbody/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sepbody {

namespace {

constexpr std::size_t kMaxAddedPerRound = 48;
constexpr int kMaxRounds = 500;

enum class Program { Support, Psi };

// Cutting-plane loop over the atom set. Support: max <u,y> s.t.
// <u_j,y> - s_j <= b_j, sum 2 w_j s_j <= rhs. Psi: min sum 2 w_j s_j s.t. the
// same rows and <u,y> = rhs.
Vector solve_program(Program kind, const Eigen::MatrixXd& atoms, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& b, std::vector<Eigen::Index> set, const Vector& u,
                     double rhs) {
  const Eigen::Index d = atoms.rows();
  const double tol = 1e-12 * (1.0 + b.cwiseAbs().maxCoeff() + std::abs(rhs));
  std::vector<char> in_set(static_cast<std::size_t>(atoms.cols()), 0);
  for (auto j : set) in_set[static_cast<std::size_t>(j)] = 1;

  for (int round = 0; round < kMaxRounds; ++round) {
    const auto k = static_cast<Eigen::Index>(set.size());
    lp::Problem p(static_cast<std::size_t>(k + 1), static_cast<std::size_t>(d + k));
    for (Eigen::Index i = 0; i < d; ++i) p.free[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index r = 0; r < k; ++r) {
      const Eigen::Index j = set[static_cast<std::size_t>(r)];
      p.a.row(r).head(d) = atoms.col(j).transpose();
      p.a(r, d + r) = -1.0;
      p.b(r) = b(j);
    }
    if (kind == Program::Support) {
      for (Eigen::Index r = 0; r < k; ++r) p.a(k, d + r) = 2.0 * w(set[static_cast<std::size_t>(r)]);
      p.objective.head(d) = u;
      p.maximize = true;
    } else {
      p.a.row(k).head(d) = u.transpose();
      p.sense[static_cast<std::size_t>(k)] = lp::Sense::Equal;
      for (Eigen::Index r = 0; r < k; ++r) p.objective(d + r) = 2.0 * w(set[static_cast<std::size_t>(r)]);
      p.maximize = false;
    }
    p.b(k) = rhs;

    const lp::Solution sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal)
      throw Error(ErrorKind::SolverFailure, "separation program did not reach an optimum");
    const Vector y = sol.x.head(d);

    const Eigen::VectorXd excess = atoms.transpose() * y - b;
    std::vector<Eigen::Index> violated;
    for (Eigen::Index j = 0; j < excess.size(); ++j)
      if (!in_set[static_cast<std::size_t>(j)] && excess(j) > tol) violated.push_back(j);
    if (violated.empty()) return y;
    if (violated.size() > kMaxAddedPerRound) {
      std::partial_sort(violated.begin(), violated.begin() + kMaxAddedPerRound, violated.end(),
                        [&](auto a, auto c) { return excess(a) > excess(c); });
      violated.resize(kMaxAddedPerRound);
    }
    for (auto j : violated) {
      in_set[static_cast<std::size_t>(j)] = 1;
      set.push_back(j);
    }
    std::sort(set.begin(), set.end());
  }
  throw Error(ErrorKind::SolverFailure, "cutting-plane loop did not settle");
}

}  // namespace

SeparationMeasure::SeparationMeasure(VPolytope body, DirectionalDistribution phi)
    : body_(std::move(body)), phi_(std::move(phi)) {
  if (body_.dim() != phi_.dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  center_ = body_.centroid();
  u_ = phi_.expanded_directions();
  w_ = phi_.expanded_weights();
  h_ = atom_supports(body_, phi_);
  b_ = h_ - u_.transpose() * center_;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi_.directions());
  const auto a = static_cast<Eigen::Index>(phi_.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(phi_.dim()); ++i) {
    const Eigen::Index j = qr.colsPermutation().indices()(i);
    basis_.push_back(j);
    basis_.push_back(j + a);
  }
  std::sort(basis_.begin(), basis_.end());
}

std::vector<Eigen::Index> SeparationMeasure::initial_set(const Eigen::VectorXd& score,
                                                         std::size_t extra) const {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(score.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  extra = std::min(extra, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(extra), order.end(),
                    [&](auto a, auto c) { return score(a) > score(c); });
  std::vector<Eigen::Index> set(basis_);
  set.insert(set.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(extra));
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

double SeparationMeasure::m(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != body_.dim())
    throw Error(ErrorKind::InvalidArgument, "point dimension mismatch");
  const Eigen::VectorXd excess = (u_.transpose() * x - h_).cwiseMax(0.0);
  return 2.0 * w_.dot(excess);
}

bool SeparationMeasure::contains(const Vector& x, double delta) const { return m(x) <= delta + 1e-12; }

PsiResult SeparationMeasure::psi(const Hyperplane& h) const {
  if (static_cast<std::size_t>(h.u.size()) != body_.dim())
    throw Error(ErrorKind::InvalidArgument, "hyperplane dimension mismatch");
  const double rhs = h.tau - h.u.dot(center_);
  const Eigen::VectorXd score = u_.transpose() * (rhs * h.u) - b_;
  const auto hits = static_cast<std::size_t>((score.array() > -1e-9).count());
  const Vector y = solve_program(Program::Psi, u_, w_, b_, initial_set(score, hits + 2), h.u, rhs);
  PsiResult out;
  out.minimizer = center_ + y;
  out.value = m(out.minimizer);
  return out;
}

double SeparationMeasure::support(const Vector& u, double delta) const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
  if (static_cast<std::size_t>(u.size()) != body_.dim() || !(u.norm() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "direction must be nonzero with matching dimension");
  if (delta == 0.0) return lp_support(k_phi(), u);
  // Seed the working set with the atoms violated where the ray along u
  // leaves the body; the optimum is usually nearby.
  const Vector y0 = boundary_ray(center_, u, delta) - center_;
  const Eigen::VectorXd score = u_.transpose() * y0 - b_;
  const auto hits = static_cast<std::size_t>((score.array() > -1e-9).count());
  const Vector y = solve_program(Program::Support, u_, w_, b_, initial_set(score, hits + 2), u, delta);
  return u.dot(center_ + y);
}

double SeparationMeasure::support_bisection(const Vector& u, double delta) const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
  const long j = phi_.find_expanded(u, 1e-9);
  if (j < 0) throw Error(ErrorKind::InvalidArgument, "bisection route needs a direction in supp phi");
  const double scale = u.norm();
  const Vector a = u_.col(j);
  const double h0 = h_(j);
  if (delta == 0.0) return scale * h0;

  auto psi_at = [&](double tau) { return psi(Hyperplane(a, tau)).value; };
  const double diam = body_.diameter();
  const double reach = 1e6 * (diam + 1.0 + delta);
  double lo = h0;
  double hi = h0 + diam + 1.0;
  while (psi_at(hi) <= delta) {
    lo = hi;
    hi = h0 + 2.0 * (hi - h0);
    if (hi - h0 > reach) throw Error(ErrorKind::BracketFailure, "psi stays below delta");
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    const double p = psi_at(mid);
    if (std::abs(p - delta) <= 1e-10) return scale * mid;
    (p <= delta ? lo : hi) = mid;
  }
  return scale * 0.5 * (lo + hi);
}

Vector SeparationMeasure::boundary_ray(const Vector& origin, const Vector& direction, double delta) const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidArgument, "delta must be > 0");
  if (m(origin) > 1e-12) throw Error(ErrorKind::InvalidArgument, "ray origin must satisfy m = 0");
  const double len = direction.norm();
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "ray direction must be nonzero");
  const Vector v = direction / len;

  double lo = 0.0, hi = 1.0;
  for (int k = 0; m(origin + hi * v) <= delta; ++k) {
    if (k > 200) throw Error(ErrorKind::BracketFailure, "m stays below delta along the ray");
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 400; ++k) {
    if (delta - m(origin + lo * v) <= 1e-10 && lo > 0.0) break;
    if (hi - lo <= 1e-15 * hi) break;
    const double mid = 0.5 * (lo + hi);
    (m(origin + mid * v) <= delta ? lo : hi) = mid;
  }
  return origin + lo * v;
}

HPolytope SeparationMeasure::k_phi() const {
  HPolytope out;
  for (Eigen::Index j = 0; j < u_.cols(); ++j) out.halfspaces.emplace_back(u_.col(j), h_(j));
  out.bounded = true;
  return out;
}

double m_value(const VPolytope& body, const DirectionalDistribution& phi, const Vector& x) {
  return SeparationMeasure(body, phi).m(x);
}

PsiResult psi_value(const Hyperplane& h, const VPolytope& body, const DirectionalDistribution& phi) {
  return SeparationMeasure(body, phi).psi(h);
}

bool membership(const SeparationQuery& q, const Vector& x) {
  return SeparationMeasure(q.body, q.phi).contains(x, q.delta);
}

double support_sepbody(const SeparationQuery& q, const Vector& u) {
  return SeparationMeasure(q.body, q.phi).support(u, q.delta);
}

double support_sepbody_bisection(const SeparationQuery& q, const Vector& u) {
  return SeparationMeasure(q.body, q.phi).support_bisection(u, q.delta);
}

Vector boundary_ray(const SeparationQuery& q, const Vector& origin, const Vector& direction) {
  return SeparationMeasure(q.body, q.phi).boundary_ray(origin, direction, q.delta);
}

HPolytope k_phi(const VPolytope& body, const DirectionalDistribution& phi) {
  return SeparationMeasure(body, phi).k_phi();
}

TangentPair tangent_vertices(const VPolytope& body, const Vector& x) {
  if (body.dim() != 2 || x.size() != 2) throw Error(ErrorKind::InvalidArgument, "tangent vertices are planar");
  std::vector<Eigen::Vector2d> pts;
  for (const auto& v : body.vertices()) pts.emplace_back(v(0), v(1));
  const auto hull = convex_hull_2d(pts);
  const std::size_t k = hull.size();
  if (k < 3) throw Error(ErrorKind::InvalidBody, "body must be full-dimensional");

  const Eigen::Vector2d p(x(0), x(1));
  const double reach = body.diameter() + (x - body.centroid()).norm();
  const double eps = kGeometricTolerance * std::max(1.0, reach * reach);
  std::vector<int> side(k);  // 1 strictly visible, 0 collinear, -1 hidden
  bool any = false;
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Vector2d a = hull[i], c = hull[(i + 1) % k];
    const double cr = (c - a).x() * (p - a).y() - (c - a).y() * (p - a).x();
    side[i] = cr < -eps ? 1 : (cr <= eps ? 0 : -1);
    any = any || side[i] == 1;
  }
  if (!any) throw Error(ErrorKind::PointInBody, "point lies in the body");

  // Collinear edges join the visible chain, which moves the tangent vertex
  // to the farther end.
  std::size_t start = 0;
  while (!(side[start] >= 0 && side[(start + k - 1) % k] < 0)) ++start;
  TangentPair out;
  std::size_t i = start;
  while (side[i % k] >= 0) {
    out.chain_length += (hull[(i + 1) % k] - hull[i % k]).norm();
    ++i;
  }
  out.first = Vector(hull[start]);
  out.second = Vector(hull[i % k]);
  return out;
}

EllipseArc ellipse_params(const VPolytope& body, const Vector& x, double delta,
                          const DirectionalDistribution& phi) {
  if (phi.kind() != DirectionalDistribution::Kind::Sigma || phi.dim() != 2)
    throw Error(ErrorKind::InvalidArgument, "elliptic arcs need a planar sigma quadrature");
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
  const TangentPair t = tangent_vertices(body, x);
  return {t.first, t.second, std::numbers::pi * delta + t.chain_length};
}

namespace {

double golden_min(const auto& f, double lo, double hi, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

// Crossing of f = level between a (f <= level) and b (f > level).
double crossing(const auto& f, double a, double b, double level, double tol) {
  while (std::abs(b - a) > tol) {
    const double mid = 0.5 * (a + b);
    (f(mid) <= level ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

double sepbody_volume(const SeparationQuery& q, const VolumeOptions& options) {
  const std::size_t d = q.body.dim();
  if (d != 2 && d != 3) throw Error(ErrorKind::InvalidArgument, "volume needs d in {2,3}");
  if (!(q.delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
  const SeparationMeasure sm(q.body, q.phi);
  const Vector& c = sm.center();

  if (q.delta == 0.0) {
    double reach = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const Vector e = Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
      reach = std::max({reach, std::abs(sm.support(e, 0.0) - c(k)), std::abs(sm.support(-e, 0.0) + c(k))});
    }
    const auto cell = halfspace_intersection(sm.k_phi().halfspaces, 2.0 * std::sqrt(double(d)) * reach + 1.0, c);
    return volume(cell.polytope);
  }

  if (d == 2) {
    const int n = std::max(options.rays, 8);
    std::vector<Vector> boundary;
    boundary.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * k / n;
      boundary.push_back(sm.boundary_ray(c, vec({std::cos(a), std::sin(a)}), q.delta));
    }
    double area = 0.0;
    for (int k = 0; k < n; ++k) {
      const Vector& p = boundary[static_cast<std::size_t>(k)];
      const Vector& r = boundary[static_cast<std::size_t>((k + 1) % n)];
      area += p(0) * r(1) - p(1) * r(0);
    }
    return 0.5 * area;
  }

  Eigen::Vector3d lo, hi;
  for (int k = 0; k < 3; ++k) {
    const Vector e = Vector::Unit(3, k);
    hi(k) = sm.support(e, q.delta);
    lo(k) = -sm.support(-e, q.delta);
  }
  const int g = std::max(options.grid, 4);
  const double dx = (hi(0) - lo(0)) / g, dy = (hi(1) - lo(1)) / g;
  const double ztol = 1e-10 * (1.0 + hi(2) - lo(2));
  double total = 0.0;
  Vector x(3);
  for (int i = 0; i < g; ++i) {
    x(0) = lo(0) + (i + 0.5) * dx;
    for (int j = 0; j < g; ++j) {
      x(1) = lo(1) + (j + 0.5) * dy;
      auto f = [&](double z) {
        x(2) = z;
        return sm.m(x);
      };
      const double zmin = golden_min(f, lo(2), hi(2), ztol);
      if (f(zmin) > q.delta) continue;
      const double top = f(hi(2)) <= q.delta ? hi(2) : crossing(f, zmin, hi(2), q.delta, ztol);
      const double bottom = f(lo(2)) <= q.delta ? lo(2) : crossing(f, zmin, lo(2), q.delta, ztol);
      total += top - bottom;
    }
  }
  return total * dx * dy;
}

double sepbody_mean_width(const SeparationQuery& q, const DirectionalDistribution& quad,
                          unsigned threads) {
  if (quad.dim() != q.body.dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  const SeparationMeasure sm(q.body, q.phi);
  const Eigen::MatrixXd u = quad.expanded_directions();
  const Eigen::VectorXd w = quad.expanded_weights();
  std::vector<double> h(static_cast<std::size_t>(u.cols()));
  detail::parallel_for(h.size(), threads, [&](std::size_t j) {
    h[j] = sm.support(u.col(static_cast<Eigen::Index>(j)), q.delta);
  });
  double sum = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) sum += w(static_cast<Eigen::Index>(j)) * h[j];
  return 2.0 * sum;
}

DirectionalDistribution width_quadrature(const DirectionalDistribution& phi) {
  if (phi.kind() == DirectionalDistribution::Kind::Sigma) return phi;
  return make_sigma(phi.dim(), phi.dim() == 2 ? 360 : 100);
}

}  // namespace sepbody
