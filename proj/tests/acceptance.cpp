// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "helpers.hpp"
#include "oracles.hpp"

#include "sepbody/cli.hpp"
#include "sepbody/directional.hpp"
#include "sepbody/poisson.hpp"
#include "sepbody/separation.hpp"
#include "sepbody/stats.hpp"
#include "sepbody/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace sepbody;
using fixtures::square;
using fixtures::triangle;

namespace {

struct Outcome {
  bool pass = false;
  std::vector<std::string> notes;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double m_square_axes(double x1, double x2) {
  return 0.5 * (std::max(0.0, std::abs(x1) - 1) + std::max(0.0, std::abs(x2) - 1));
}

// min over x2 of m on the line x1 = tau, by grid search.
double psi_grid(double tau, double step) {
  double best = INFINITY;
  for (double y = -3.0; y <= 3.0; y += step) best = std::min(best, m_square_axes(tau, y));
  return best;
}

Outcome closed_form() {
  Outcome out;
  const VPolytope k = square();
  const auto axes = make_axes(2);
  const SeparationQuery q{k, axes, 0.5};
  const double m = m_value(k, axes, vec({2, 0}));
  const double psi = psi_value(Hyperplane(vec({1, 0}), 2.0), k, axes).value;
  const double h = support_sepbody(q, vec({1, 0}));
  const Vector b = boundary_ray(q, vec({0, 0}), vec({1, 1}) / std::sqrt(2.0));

  const double m_grid = m_square_axes(2, 0);
  const double psi_g = psi_grid(2.0, 1e-4);
  double h_grid = 0.0;
  for (double t = 0.0; t <= 4.0; t += 1e-4)
    if (psi_grid(t, 1e-2) <= 0.5) h_grid = t;
  double t_ray = 0.0;
  for (double t = 0.0; t <= 4.0; t += 1e-4)
    if (m_square_axes(t / std::sqrt(2.0), t / std::sqrt(2.0)) <= 0.5) t_ray = t;
  const Vector b_grid = t_ray / std::sqrt(2.0) * vec({1, 1});

  const bool exact = std::abs(m - 0.5) <= 1e-9 && std::abs(psi - 0.5) <= 1e-9 && std::abs(h - 2.0) <= 1e-9 &&
                     (b - vec({1.5, 1.5})).norm() <= 1e-9;
  const bool grid = std::abs(m - m_grid) <= 1e-4 && std::abs(psi - psi_g) <= 1e-4 &&
                    std::abs(h - h_grid) <= 1e-4 && (b - b_grid).norm() <= 1e-4;
  out.pass = exact && grid;
  out.notes.push_back(fmt("m=%.12g psi=%.12g h=%.12g boundary=(%.12g, %.12g)", m, psi, h, b(0), b(1)));
  out.notes.push_back(fmt("grid: m=%.6g psi=%.6g h=%.6g boundary=(%.6g, %.6g)", m_grid, psi_g, h_grid, b_grid(0),
                          b_grid(1)));
  return out;
}

DirectionalDistribution random_discrete(Rng& rng, std::size_t d, int atoms) {
  std::vector<std::pair<Vector, double>> pairs;
  for (std::size_t i = 0; i < d; ++i) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    pairs.emplace_back(e, fixtures::uniform(rng, 0.2, 1.0));
  }
  for (int i = 0; i < atoms; ++i) pairs.emplace_back(fixtures::random_unit(rng, d), fixtures::uniform(rng, 0.2, 1.0));
  return make_discrete(pairs);
}

Outcome monte_carlo_m() {
  Outcome out;
  Rng rng(2024);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const VPolytope k = fixtures::random_body(rng, 2, 5 + i % 4);
    const auto phi = i % 2 ? make_sigma(2, 72) : random_discrete(rng, 2, 2 + i % 5);
    const Vector x = fixtures::random_unit(rng, 2) * fixtures::uniform(rng, 1.0, 2.5);
    const double m = m_value(k, phi, x);
    const double r = std::max(x.norm(), k.matrix().colwise().norm().maxCoeff()) + 0.5;
    const auto mc = oracle::mc_separating_measure(k.vertices(), x, phi.expanded_directions(),
                                                  phi.expanded_weights(), r, 1000000, 500 + i);
    const double z = mc.se > 0 ? std::abs(m - mc.mean) / mc.se : (m == 0.0 ? 0.0 : INFINITY);
    worst = std::max(worst, z);
    if (z > 3.0) ++bad;
  }
  out.pass = bad == 0;
  out.notes.push_back(fmt("pairs beyond 3 SE: %d of 20, largest |z| = %.2f", bad, worst));
  return out;
}

Outcome properties() {
  Outcome out;
  Rng rng(77);
  struct Setup {
    VPolytope body;
    DirectionalDistribution phi;
  };
  std::vector<Setup> setups{{square(), make_axes(2)},
                            {triangle(), make_sigma(2, 36)},
                            {fixtures::random_body(rng, 2, 7), random_discrete(rng, 2, 5)},
                            {fixtures::random_body(rng, 3, 10), random_discrete(rng, 3, 6)},
                            {fixtures::cube(), make_sigma(3, 36)}};
  long convex = 0, lipschitz = 0, zero = 0, monotone = 0, routes = 0, kphi = 0;
  double route_gap = 0.0;
  for (const auto& s : setups) {
    const SeparationMeasure sm(s.body, s.phi);
    const std::size_t d = s.body.dim();
    for (int t = 0; t < 1000; ++t) {
      if (sm.m(fixtures::random_inside(rng, s.body)) > 1e-12) ++zero;
      const Vector x = fixtures::random_point(rng, d, -3, 3), y = fixtures::random_point(rng, d, -3, 3);
      const double a = rng.uniform();
      const double mx = sm.m(x), my = sm.m(y);
      if (sm.m((1 - a) * x + a * y) > (1 - a) * mx + a * my + 1e-12) ++convex;
      if (std::abs(mx - my) > 2 * (x - y).norm() + 1e-12) ++lipschitz;
    }
    const auto u = s.phi.expanded_directions();
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double h = support(s.body, u.col(j));
      double last = 0.0;
      for (double step : {0.01, 0.1, 0.3, 0.7, 1.5}) {
        const double v = sm.psi(Hyperplane(u.col(j), h + step)).value;
        if (!(v > last)) ++monotone;
        last = v;
      }
      for (double delta : {0.05, 0.4}) {
        const double g = std::abs(sm.support(u.col(j), delta) - sm.support_bisection(u.col(j), delta));
        route_gap = std::max(route_gap, g);
        if (g > 1e-7) ++routes;
      }
    }
    const HPolytope kp = sm.k_phi();
    for (int t = 0; t < 10000; ++t) {
      const Vector x = fixtures::random_point(rng, d, -2, 2);
      if (sm.contains(x, 0.0) != kp.contains(x, 1e-12)) ++kphi;
    }
  }
  out.pass = convex + lipschitz + zero + monotone + routes + kphi == 0;
  out.notes.push_back(fmt("violations: convexity %ld, Lipschitz %ld, zero on K %ld, monotone psi %ld, "
                          "routes %ld (max gap %.2e), K_phi %ld",
                          convex, lipschitz, zero, monotone, routes, route_gap, kphi));
  return out;
}

Outcome ellipse() {
  Outcome out;
  const VPolytope k = square();
  const auto sigma = make_sigma(2, 3600);
  const SeparationMeasure sm(k, sigma);
  const EllipseArc e = ellipse_params(k, vec({3, 0}), 0.3, sigma);
  double lo = INFINITY, hi = -INFINITY;
  bool same_region = true;
  for (int i = 0; i < 50; ++i) {
    const double a = -0.4 + 0.8 * i / 49.0;
    const Vector y = sm.boundary_ray(vec({0, 0}), vec({std::cos(a), std::sin(a)}), 0.3);
    const TangentPair tp = tangent_vertices(k, y);
    if ((tp.first - e.p).norm() + (tp.second - e.q).norm() != 0.0) same_region = false;
    const double s = (y - e.p).norm() + (y - e.q).norm();
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  out.pass = same_region && hi - lo <= 1e-4;
  out.notes.push_back(fmt("sigma order 3600, spread %.3e, axis sum %.8f (pi*0.3+2 = %.8f)", hi - lo, 0.5 * (lo + hi),
                          0.3 * std::numbers::pi + 2.0));
  return out;
}

Outcome volume_identity() {
  Outcome out;
  CheckOptions opt;
  opt.reps = 30000;
  opt.seed = 313;
  const auto r = check_eq313(square(), make_axes(2), 4, opt);
  out.pass = r.verdict == Verdict::Pass;
  const auto& c = r.comparisons.front();
  const double integral = r.extra["integral"].get<double>();
  out.notes.push_back(fmt("EV-V(K)=%.5f (SE %.5f) integral=%.5f (err %.2e) diff %.5f tolerance %.5f verdict %s",
                          c.estimate->mean + integral, c.estimate->se, integral,
                          r.extra["integral_error"].get<double>(), c.estimate->mean, *c.tolerance,
                          to_string(r.verdict)));
  return out;
}

struct SuiteRun {
  std::string label;
  int n;
  std::vector<TheoremReport> reports;
};

std::vector<SuiteRun>& planar_suites() {
  static std::vector<SuiteRun> runs;
  if (!runs.empty()) return runs;
  const auto sigma = make_sigma(2, 360);
  for (const auto& [label, body] : {std::pair{"square", square()}, std::pair{"triangle", triangle()}}) {
    for (int n : {1, 5, 20}) {
      CheckOptions opt;
      opt.reps = 10000;
      opt.seed = 32;
      opt.body_label = label;
      runs.push_back({label, n, run_theorem_suite(body, sigma, n, opt)});
    }
  }
  return runs;
}

const TheoremReport& find(const std::vector<TheoremReport>& rs, const std::string& check) {
  for (const auto& r : rs)
    if (r.check == check) return r;
  throw std::runtime_error("missing report " + check);
}

// Zero fails and at most one inconclusive comparison per suite.
bool tally(const std::vector<const TheoremReport*>& reports, Outcome& out, const std::string& label) {
  int fails = 0, inconclusive = 0;
  for (const auto* r : reports)
    for (const auto& c : r->comparisons) {
      if (c.verdict == Verdict::Fail) ++fails;
      if (c.verdict == Verdict::Inconclusive) ++inconclusive;
    }
  const bool ok = fails == 0 && inconclusive <= 1;
  out.notes.push_back(fmt("%-22s fail %d, inconclusive %d: %s", label.c_str(), fails, inconclusive, ok ? "ok" : "not ok"));
  return ok;
}

std::string describe(const Comparison& c) {
  std::string dir;
  for (double v : c.direction) dir += fmt("%s%.3f", dir.empty() ? "" : ",", v);
  std::string s = fmt("    %-10s", c.quantity.c_str());
  if (!dir.empty()) s += fmt(" u=(%s)", dir.c_str());
  if (c.estimate) s += fmt(" est=%.5f+-%.5f", c.estimate->mean, c.estimate->half_width());
  if (c.lower) s += fmt(" lo=%.5f", *c.lower);
  if (c.upper) s += fmt(" hi=%.5f", *c.upper);
  if (c.ratio) s += fmt(" ratio=%.3f", *c.ratio);
  return s + " " + to_string(c.verdict);
}

Outcome support_bounds() {
  Outcome out;
  bool ok = true;
  for (const auto& run : planar_suites()) {
    const auto& r = find(run.reports, "thm32");
    ok = tally({&r}, out, fmt("%s n=%d", run.label.c_str(), run.n)) && ok;
    for (const auto& c : r.comparisons) out.notes.push_back(describe(c));
  }
  out.pass = ok;
  return out;
}

Outcome width_and_volume() {
  Outcome out;
  bool ok = true;
  for (const auto& run : planar_suites()) {
    const auto& w = find(run.reports, "thm33");
    const auto& v = find(run.reports, "thm31");
    ok = tally({&w, &v}, out, fmt("%s n=%d", run.label.c_str(), run.n)) && ok;
    for (const auto* r : {&w, &v})
      for (const auto& c : r->comparisons) out.notes.push_back(describe(c));
  }
  CheckOptions opt;
  opt.reps = 3000;
  opt.seed = 33;
  opt.body_label = "cube";
  const auto cube = run_theorem_suite(fixtures::cube(), make_sigma(3, 100), 5, opt);
  const auto& w = find(cube, "thm33");
  const auto& v = find(cube, "thm31");
  ok = tally({&w, &v}, out, "cube n=5") && ok;
  for (const auto* r : {&w, &v})
    for (const auto& c : r->comparisons) out.notes.push_back(describe(c));
  out.pass = ok;
  return out;
}

Outcome poisson_law() {
  Outcome out;
  ProcessParams p;
  p.n = 5;
  p.phi = make_sigma(2, 360);
  const KCellSampler sampler(square(), p);
  std::vector<std::uint64_t> counts(100000);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    Rng rng = Rng::substream(8, k);
    counts[k] = sampler.draw_hyperplanes(rng).size();
  }
  const TestResult gof = poisson_gof(counts, sampler.mean_count());

  CheckOptions opt;
  opt.seed = 34;
  const auto cond = check_conditional(square(0.2), make_sigma(2, 360), 2, opt);
  out.pass = gof.p_value > 0.01 && cond.verdict == Verdict::Pass;
  out.notes.push_back(fmt("counts: mean %.4f, chi-square %.2f on %.0f dof, p=%.4f", sampler.mean_count(),
                          gof.statistic, gof.dof, gof.p_value));
  std::string ks = "conditional KS p-values:";
  for (const auto& c : cond.comparisons) ks += fmt(" %s=%.4f", c.quantity.c_str(), *c.p_value);
  out.notes.push_back(ks + " verdict " + to_string(cond.verdict));
  return out;
}

std::string cli_simulate(const std::string& threads) {
  const std::string body = std::string(SEPBODY_DATA_DIR) + "/triangle.json";
  const std::vector<std::string> args{"sepbody", "--body",    body,    "--phi", "sigma2d:72", "--seed", "9",
                                      "--reps",  "400",       "--threads", threads, "simulate", "--n",  "3"};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  return std::to_string(code) + o.str();
}

Outcome determinism() {
  Outcome out;
  auto reports = [](unsigned threads) {
    CheckOptions opt;
    opt.reps = 1500;
    opt.seed = 91;
    opt.threads = threads;
    std::string s;
    for (const auto& r : run_theorem_suite(triangle(), make_sigma(2, 72), 3, opt)) s += r.to_json().dump();
    s += check_eq313(square(), make_axes(2), 4, opt).to_json().dump();
    opt.accept = 300;
    s += check_conditional(square(0.2), make_sigma(2, 72), 2, opt).to_json().dump();
    return s;
  };
  const std::string a = reports(1), b = reports(1), c = reports(4);
  const std::string s1 = cli_simulate("1"), s2 = cli_simulate("1"), s4 = cli_simulate("4");
  out.pass = a == b && a == c && s1 == s2 && s1 == s4 && s1.front() == '0';
  out.notes.push_back(fmt("library reports %zu bytes, rerun %s, 4 threads %s; CLI simulate rerun %s, 4 threads %s",
                          a.size(), a == b ? "identical" : "differs", a == c ? "identical" : "differs",
                          s1 == s2 ? "identical" : "differs", s1 == s4 ? "identical" : "differs"));
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* what;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "closed-form values on the square", 1, closed_form},
      {2, "m against a Monte Carlo hyperplane count", 60, monte_carlo_m},
      {3, "property suite", 60, properties},
      {4, "elliptic boundary arcs", 10, ellipse},
      {5, "volume identity for the K-cell", 300, volume_identity},
      {6, "support bounds (thm32)", 600, support_bounds},
      {7, "mean width and volume bounds (thm33, thm31)", 900, width_and_volume},
      {8, "Poisson counts and conditioning", 300, poisson_law},
      {9, "determinism across reruns and thread counts", INFINITY, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.notes.push_back(std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d: %s  %s (%.1f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.what, secs,
                in_time ? "" : ", over time limit");
    for (const auto& n : o.notes) std::printf("  %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
