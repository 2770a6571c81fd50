#include "sepbody/poisson.hpp"

#include "parallel.hpp"
#include "sepbody/error.hpp"
#include "sepbody/hull.hpp"
#include "sepbody/separation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace sepbody {

double default_window_radius(const VPolytope& body, const DirectionalDistribution& phi, int n,
                             const Vector& center) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "intensity must be a positive integer");
  const VPolytope shifted = body.translated(-center);
  const double reach = atom_supports(shifted, phi).maxCoeff();
  double far = 0.0;
  for (const auto& v : shifted.vertices()) far = std::max(far, v.norm());
  const double r = 4.0 * std::max(reach, 0.0) + 8.0 / n;
  return r > far ? r : 1.5 * far;
}

double default_window_radius(const VPolytope& body, const DirectionalDistribution& phi, int n) {
  return default_window_radius(body, phi, n, body.centroid());
}

KCellSampler::KCellSampler(VPolytope body, ProcessParams params)
    : body_(std::move(body)), params_(std::move(params)) {
  if (params_.n < 1) throw Error(ErrorKind::InvalidArgument, "intensity must be a positive integer");
  if (body_.dim() != params_.phi.dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  if (params_.max_doublings < 0 || params_.initial_doublings < 0)
    throw Error(ErrorKind::InvalidArgument, "doubling counts must be nonnegative");
  center_ = body_.centroid();
  const Eigen::VectorXd h = atom_supports(body_.translated(-center_), params_.phi);
  const auto a = static_cast<Eigen::Index>(params_.phi.size());
  upper_ = h.head(a);
  lower_ = h.tail(a);
  radius_ = params_.radius > 0.0 ? params_.radius
                                 : default_window_radius(body_, params_.phi, params_.n, center_);
  if (!(radius_ > std::max(upper_.maxCoeff(), lower_.maxCoeff())))
    throw Error(ErrorKind::InvalidArgument, "window radius must exceed the atom supports of K");

  std::vector<double> tilt(static_cast<std::size_t>(a)), flat(static_cast<std::size_t>(a), 1.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < a; ++i) {
    tilt[static_cast<std::size_t>(i)] = 2.0 * radius_ - upper_(i) - lower_(i);
    total += params_.phi.weights()(i) * tilt[static_cast<std::size_t>(i)];
  }
  mean_count_ = 2.0 * params_.n * total;
  core_.emplace(params_.phi, tilt);
  shell_.emplace(params_.phi, flat);
}

Halfspace KCellSampler::make_halfspace(std::size_t atom, double offset) const {
  const Vector u = params_.phi.atom(atom);
  const double shift = u.dot(center_);
  if (offset > 0.0) return Halfspace(u, offset + shift);
  return Halfspace(-u, -(offset + shift));
}

std::vector<Halfspace> KCellSampler::draw_hyperplanes(Rng& rng) const {
  const std::uint64_t count = rng.poisson(mean_count_);
  std::vector<Halfspace> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::size_t i = (*core_)(rng);
    const auto ii = static_cast<Eigen::Index>(i);
    const double above = radius_ - upper_(ii);
    const double v = rng.uniform() * (above + radius_ - lower_(ii));
    out.push_back(v < above ? make_halfspace(i, upper_(ii) + v)
                            : make_halfspace(i, -(lower_(ii) + v - above)));
  }
  return out;
}

std::vector<Halfspace> KCellSampler::draw_shell(Rng& rng, double r) const {
  const std::uint64_t count = rng.poisson(2.0 * params_.n * r);
  std::vector<Halfspace> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::size_t i = (*shell_)(rng);
    const double v = rng.uniform() * 2.0 * r;
    out.push_back(make_halfspace(i, v < r ? r + v : -v));
  }
  return out;
}

KCellSample KCellSampler::complete(std::vector<Halfspace> hs, double r, Rng& rng) const {
  for (int doubling = 0;; ++doubling) {
    IntersectionResult res = halfspace_intersection(hs, r, center_);
    double far = 0.0;
    for (const auto& v : res.polytope.vertices()) far = std::max(far, (v - center_).norm());
    if (far < r) {
      KCellSample out;
      out.cell.halfspaces = std::move(hs);
      out.cell.bounded = true;
      out.polytope = std::move(res.polytope);
      out.hit_window = doubling > 0;
      out.doublings = doubling;
      out.radius = r;
      return out;
    }
    if (doubling == params_.max_doublings)
      throw Error(ErrorKind::WindowExhausted, "cell still reaches the window after enlarging it");
    auto shell = draw_shell(rng, r);
    hs.insert(hs.end(), shell.begin(), shell.end());
    r *= 2.0;
  }
}

KCellSample KCellSampler::operator()(Rng& rng) const {
  auto hs = draw_hyperplanes(rng);
  double r = radius_;
  for (int k = 0; k < params_.initial_doublings; ++k) {
    auto shell = draw_shell(rng, r);
    hs.insert(hs.end(), shell.begin(), shell.end());
    r *= 2.0;
  }
  const std::size_t count = hs.size();
  KCellSample out = complete(std::move(hs), r, rng);
  out.count = count;
  return out;
}

KCellSample sample_kcell(const VPolytope& body, const ProcessParams& params, Rng& rng) {
  return KCellSampler(body, params)(rng);
}

KCellSample sample_zero_cell(const ProcessParams& params, Rng& rng) {
  const VPolytope origin({Vector::Zero(static_cast<Eigen::Index>(params.phi.dim()))});
  return KCellSampler(origin, params)(rng);
}

namespace {

constexpr int kMaxRetries = 10;

}  // namespace

FunctionalEstimates estimate_functionals(const VPolytope& body, const ProcessParams& params,
                                         const EstimateOptions& options) {
  if (options.reps < 2) throw Error(ErrorKind::InvalidArgument, "need at least two replications");
  for (const auto& u : options.probes)
    if (static_cast<std::size_t>(u.size()) != body.dim() || !(u.norm() > 0.0))
      throw Error(ErrorKind::InvalidArgument, "probe directions must be nonzero with matching dimension");
  const KCellSampler sampler(body, params);
  const DirectionalDistribution quad = options.width_quad ? *options.width_quad : width_quadrature(params.phi);

  std::vector<ReplicationRecord> records(options.reps);
  detail::parallel_for(options.reps, options.threads, [&](std::size_t k) {
    ReplicationRecord& rec = records[k];
    rec.seed_index = k;
    for (int attempt = 0;; ++attempt) {
      Rng rng = attempt == 0 ? Rng::substream(params.seed, k, options.salt)
                             : Rng::substream(params.seed, k, options.salt + 0x5bd1e995ULL * attempt);
      try {
        const KCellSample s = sampler(rng);
        rec.count = s.count;
        rec.hit_window = s.hit_window;
        rec.doublings = s.doublings;
        rec.V = volume(s.polytope);
        rec.W = mean_width(s.polytope, quad);
        rec.h.clear();
        if (options.lp_probes) {
          HPolytope full = s.cell;
          auto window = window_halfspaces(body.dim(), s.radius, sampler.center());
          full.halfspaces.insert(full.halfspaces.end(), window.begin(), window.end());
          for (const auto& u : options.probes) rec.h.push_back(lp_support(full, u));
        } else {
          for (const auto& u : options.probes) rec.h.push_back(support(s.polytope, u));
        }
        return;
      } catch (const Error& e) {
        const bool degenerate = e.kind() == ErrorKind::EmptyCell || e.kind() == ErrorKind::DegenerateCell;
        if (!degenerate || attempt == kMaxRetries)
          throw Error(ErrorKind::ReplicationFailure, "replication " + std::to_string(k) + ": " + e.what());
        ++rec.retries;
      }
    }
  });

  FunctionalEstimates out;
  out.reps = options.reps;
  out.radius = sampler.radius();
  std::vector<double> buf(options.reps);
  for (std::size_t p = 0; p < options.probes.size(); ++p) {
    for (std::size_t k = 0; k < options.reps; ++k) buf[k] = records[k].h[p];
    out.h.push_back(summarize(buf, options.level));
  }
  for (std::size_t k = 0; k < options.reps; ++k) buf[k] = records[k].W;
  out.W = summarize(buf, options.level);
  for (std::size_t k = 0; k < options.reps; ++k) buf[k] = records[k].V;
  out.V = summarize(buf, options.level);
  for (const auto& r : records) {
    out.hit_window += r.hit_window ? 1 : 0;
    out.retries += static_cast<std::size_t>(r.retries);
  }
  if (options.keep_records) out.records = std::move(records);
  return out;
}

IntegralResult integral_313(const VPolytope& body, const DirectionalDistribution& phi, int n,
                            const GridSpec& grid) {
  const std::size_t d = body.dim();
  if (d != 2 && d != 3) throw Error(ErrorKind::InvalidArgument, "integral needs d in {2,3}");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "intensity must be a positive integer");
  if (grid.initial < 2) throw Error(ErrorKind::InvalidArgument, "initial resolution must be at least 2");
  const SeparationMeasure sm(body, phi);
  const double level = grid.level > 0.0 ? grid.level : 20.0 / n;
  const int max_res = grid.max_resolution > 0 ? grid.max_resolution : (d == 2 ? 2048 : 128);

  Eigen::VectorXd lo(static_cast<Eigen::Index>(d)), hi(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) {
    const Vector e = Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    hi(static_cast<Eigen::Index>(k)) = sm.support(e, level);
    lo(static_cast<Eigen::Index>(k)) = -sm.support(-e, level);
  }
  const Eigen::MatrixXd ut = phi.expanded_directions().transpose();
  const Eigen::VectorXd w2 = 2.0 * phi.expanded_weights();
  const Eigen::VectorXd& h = sm.supports();
  const double base = volume(body);

  // Midpoint rule; points are processed one grid line at a time.
  auto integrate = [&](int res) {
    const Eigen::VectorXd step = (hi - lo) / res;
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(d), res);
    for (int i = 0; i < res; ++i) pts(0, i) = lo(0) + (i + 0.5) * step(0);
    const long lines = d == 2 ? res : static_cast<long>(res) * res;
    double sum = 0.0;
    for (long line = 0; line < lines; ++line) {
      pts.row(1).setConstant(lo(1) + (line % res + 0.5) * step(1));
      if (d == 3) pts.row(2).setConstant(lo(2) + (line / res + 0.5) * step(2));
      const Eigen::MatrixXd excess = ((ut * pts).colwise() - h).cwiseMax(0.0);
      const Eigen::RowVectorXd m = w2.transpose() * excess;
      sum += (-static_cast<double>(n) * m.array()).exp().sum();
    }
    return sum * step.prod() - base;
  };

  IntegralResult out;
  out.level = level;
  int res = std::min(grid.initial, max_res);
  double prev = integrate(res);
  double err = std::numeric_limits<double>::infinity();
  while (2 * res <= max_res) {
    res *= 2;
    const double cur = integrate(res);
    err = std::abs(cur - prev);
    prev = cur;
    if (err <= grid.tolerance * std::max(1.0, std::abs(cur))) break;
  }

  double r = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    Vector p(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k)
      p(static_cast<Eigen::Index>(k)) = (corner >> k) & 1 ? hi(static_cast<Eigen::Index>(k)) : lo(static_cast<Eigen::Index>(k));
    r = std::max(r, (p - sm.center()).norm());
  }
  const double a = n * level;
  out.tail = d == 2 ? 2.0 * std::numbers::pi * r * r * std::exp(-a) * (1.0 / a + 1.0 / (a * a))
                    : 4.0 * std::numbers::pi * r * r * r * std::exp(-a) *
                          (1.0 / a + 2.0 / (a * a) + 2.0 / (a * a * a));
  out.value = prev;
  out.error = err + out.tail;
  out.resolution = res;
  return out;
}

namespace {

bool origin_in_interior(const VPolytope& body) {
  const double eps = kGeometricTolerance * std::max(1.0, body.diameter());
  if (body.dim() == 2) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& v : body.vertices()) pts.emplace_back(v(0), v(1));
    const auto hull = convex_hull_2d(pts);
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Eigen::Vector2d a = hull[i], b = hull[(i + 1) % hull.size()];
      if ((b - a).x() * (-a).y() - (b - a).y() * (-a).x() <= eps * (b - a).norm()) return false;
    }
    return true;
  }
  std::vector<Eigen::Vector3d> pts;
  for (const auto& v : body.vertices()) pts.emplace_back(v(0), v(1), v(2));
  const Hull3D hull = convex_hull_3d(pts);
  if (hull.empty()) return false;
  for (const auto& t : hull.triangles)
    if (hull.normal(t).dot(hull.points[t[0]]) <= eps) return false;
  return true;
}

}  // namespace

ConditionalResult conditional_zero_cell(const VPolytope& body, const ProcessParams& params,
                                        std::size_t accept, std::uint64_t salt) {
  const std::size_t d = body.dim();
  if (d != 2 && d != 3) throw Error(ErrorKind::InvalidArgument, "conditional sampling needs d in {2,3}");
  if (accept == 0) throw Error(ErrorKind::InvalidArgument, "need at least one accepted sample");
  if (!origin_in_interior(body)) throw Error(ErrorKind::InvalidArgument, "the origin must lie in the interior of K");
  const Vector origin = Vector::Zero(static_cast<Eigen::Index>(d));
  double far = 0.0;
  for (const auto& v : body.vertices()) far = std::max(far, v.norm());

  ProcessParams zp = params;
  zp.initial_doublings = 0;
  if (zp.radius <= 0.0) zp.radius = default_window_radius(body, params.phi, params.n, origin);
  if (!(zp.radius > far)) throw Error(ErrorKind::InvalidArgument, "window must contain K");
  const KCellSampler zero(VPolytope({origin}), zp);

  ConditionalResult out;
  out.expected_acceptance = std::exp(-2.0 * params.n * phi_functional(body, params.phi));
  out.low_acceptance = out.expected_acceptance < 1e-4;
  const double budget = std::ceil(100.0 * static_cast<double>(accept) / out.expected_acceptance);

  while (out.samples.size() < accept) {
    if (static_cast<double>(out.draws) >= budget)
      throw Error(ErrorKind::AcceptanceBudget, "acceptance budget of " + std::to_string(budget) + " draws exceeded");
    Rng rng = Rng::substream(params.seed, out.draws, salt);
    ++out.draws;
    auto hs = zero.draw_hyperplanes(rng);
    const bool hits = std::any_of(hs.begin(), hs.end(), [&](const Halfspace& h) { return support(body, h.u) >= h.tau; });
    if (hits) continue;
    const std::size_t count = hs.size();
    out.samples.push_back(zero.complete(std::move(hs), zero.radius(), rng));
    out.samples.back().count = count;
  }
  out.acceptance = static_cast<double>(out.samples.size()) / static_cast<double>(out.draws);
  return out;
}

}  // namespace sepbody
