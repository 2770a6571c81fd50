#include "helpers.hpp"
#include "oracles.hpp"

#include "sepbody/directional.hpp"
#include "sepbody/error.hpp"
#include "sepbody/poisson.hpp"
#include "sepbody/separation.hpp"
#include "sepbody/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sepbody;
using fixtures::square;

namespace {

ProcessParams params_for(int n, DirectionalDistribution phi, std::uint64_t seed, double radius = 0.0) {
  ProcessParams p;
  p.n = n;
  p.phi = std::move(phi);
  p.seed = seed;
  p.radius = radius;
  return p;
}

std::vector<std::uint64_t> counts(const KCellSampler& s, std::size_t draws, std::uint64_t seed) {
  std::vector<std::uint64_t> out(draws);
  for (std::size_t k = 0; k < draws; ++k) {
    Rng rng = Rng::substream(seed, k);
    out[k] = s.draw_hyperplanes(rng).size();
  }
  return out;
}

}  // namespace

TEST_CASE("hyperplane counts are Poisson with mean 2n(R - Phi)") {
  const auto phi = make_sigma(2, 36);
  const KCellSampler s(square(), params_for(2, phi, 1, 5.0));
  const double mean = 2 * 2 * (5.0 - phi_functional(square(), phi));
  CHECK(s.mean_count() == doctest::Approx(mean).epsilon(1e-14));
  const std::size_t draws = 100000;
  const auto c = counts(s, draws, 7);
  std::vector<double> x(c.begin(), c.end());
  const EstimateWithCI e = summarize(x);
  CHECK(std::abs(e.mean - mean) < 3 * std::sqrt(mean / draws));
  CHECK(e.se * e.se * draws == doctest::Approx(mean).epsilon(0.02));
  CHECK(poisson_gof(c, mean).p_value > 0.01);
}

TEST_CASE("drawn hyperplanes miss K and meet the window") {
  Rng rng(3);
  const VPolytope k = fixtures::random_body(rng, 2, 6);
  const auto phi = make_sigma(2, 20);
  const KCellSampler s(k, params_for(3, phi, 1));
  int violations = 0;
  for (int t = 0; t < 2000; ++t) {
    for (const auto& h : s.draw_hyperplanes(rng)) {
      const Halfspace up = h.as_upper();
      if (support(k, up.u) > up.tau) ++violations;
      if (up.tau - up.u.dot(s.center()) > s.radius()) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("K lies in every sampled cell") {
  Rng rng(4);
  for (std::size_t d : {2u, 3u}) {
    const VPolytope k = fixtures::random_body(rng, d, 8);
    const auto phi = make_sigma(d, d == 2 ? 36 : 64);
    const KCellSampler s(k, params_for(2, phi, 1));
    for (int t = 0; t < 200; ++t) {
      const KCellSample c = s(rng);
      for (int j = 0; j < 20; ++j) {
        const Vector u = fixtures::random_unit(rng, d);
        CHECK(support(c.polytope, u) >= support(k, u) - 1e-9);
      }
      for (const auto& v : k.vertices()) CHECK(c.cell.contains(v));
    }
  }
}

TEST_CASE("zero cells") {
  const auto phi = make_sigma(2, 36);
  const ProcessParams p = params_for(3, phi, 1, 4.0);
  const KCellSampler s(VPolytope({vec({0, 0})}), p);
  const double mean = 2 * 3 * 4.0;
  CHECK(s.mean_count() == doctest::Approx(mean));
  const auto c = counts(s, 20000, 9);
  double avg = 0.0;
  for (auto v : c) avg += static_cast<double>(v) / c.size();
  CHECK(std::abs(avg - mean) < 3 * std::sqrt(mean / c.size()));
  Rng rng(2);
  for (int t = 0; t < 200; ++t) CHECK(sample_zero_cell(p, rng).cell.contains(vec({0, 0})));

  double last = INFINITY;
  for (int n : {1, 2, 4, 8}) {
    EstimateOptions o;
    o.reps = 2000;
    const auto est = estimate_functionals(VPolytope({vec({0, 0})}), params_for(n, phi, 5), o);
    CHECK(est.W.upper() < last);
    last = est.W.lower();
  }
}

TEST_CASE("invalid process parameters") {
  CHECK_THROWS_AS(KCellSampler(square(), params_for(0, make_axes(2), 1)), Error);
  CHECK_THROWS_AS(KCellSampler(square(), params_for(1, make_axes(3), 1)), Error);
  CHECK_THROWS_AS(KCellSampler(square(), params_for(1, make_axes(2), 1, 0.5)), Error);
  EstimateOptions o;
  o.reps = 1;
  CHECK_THROWS_AS(estimate_functionals(square(), params_for(1, make_axes(2), 1), o), Error);
}

TEST_CASE("dense hyperplanes pin the cell to K") {
  const VPolytope k = square(0.5);
  const auto phi = make_sigma(2, 36);
  EstimateOptions o;
  o.reps = 1000;
  o.probes = {vec({1, 0}), phi.atom(5)};
  const auto coarse = estimate_functionals(k, params_for(20, phi, 3), o);
  const auto dense = estimate_functionals(k, params_for(200, phi, 3), o);
  for (std::size_t i = 0; i < o.probes.size(); ++i) {
    const double h = support(k, o.probes[i]);
    CHECK(dense.h[i].mean - h < 0.4 * (coarse.h[i].mean - h));
    CHECK(dense.h[i].mean - h < 0.1);
  }
  CHECK(dense.V.mean - volume(k) < 0.4 * (coarse.V.mean - volume(k)));
  CHECK(dense.W.mean - mean_width(k, phi) < 0.4 * (coarse.W.mean - mean_width(k, phi)));
}

TEST_CASE("estimates are reproducible and independent of the thread count") {
  const auto phi = make_sigma(2, 36);
  EstimateOptions o;
  o.reps = 500;
  o.probes = {vec({1, 0})};
  o.threads = 1;
  const auto a = estimate_functionals(fixtures::triangle(), params_for(2, phi, 77), o);
  o.threads = 4;
  const auto b = estimate_functionals(fixtures::triangle(), params_for(2, phi, 77), o);
  const auto c = estimate_functionals(fixtures::triangle(), params_for(2, phi, 77), o);
  CHECK(a.V.mean == b.V.mean);
  CHECK(a.W.se == b.W.se);
  CHECK(a.h[0].mean == b.h[0].mean);
  CHECK(b.V.mean == c.V.mean);
  const auto d = estimate_functionals(fixtures::triangle(), params_for(2, phi, 78), o);
  CHECK(a.V.mean != d.V.mean);
}

TEST_CASE("linear programming probes agree with the vertex form") {
  const auto phi = make_sigma(2, 36);
  EstimateOptions o;
  o.reps = 200;
  o.probes = {vec({1, 0}), vec({0.6, -0.8})};
  o.keep_records = true;
  const auto a = estimate_functionals(square(), params_for(1, phi, 5), o);
  o.lp_probes = true;
  const auto b = estimate_functionals(square(), params_for(1, phi, 5), o);
  for (std::size_t k = 0; k < o.reps; ++k)
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(a.records[k].h[i] - b.records[k].h[i]) < 1e-9);
}

TEST_CASE("volume integral") {
  SUBCASE("exact value for the square with axis directions") {
    // exp(-4m) = exp(-2 a1) exp(-2 a2) with a_i = (|x_i| - 1)_+; the plane integral is 3^2.
    const auto r = integral_313(square(), make_axes(2), 4);
    CHECK(std::abs(r.value - 5.0) <= r.error);
    CHECK(r.error < 1e-3);
  }
  SUBCASE("exact value for the cube with axis directions") {
    // (2 + 2 * 3/5)^3 - 8.
    const auto r = integral_313(fixtures::cube(), make_axes(3), 5);
    CHECK(std::abs(r.value - 24.768) <= r.error);
  }
  SUBCASE("point-sampling oracle") {
    Rng rng(8);
    const VPolytope k = square();
    const auto phi = make_axes(2);
    const std::size_t draws = 400000;
    const double box = 1.0 + 20.0 / 4 * 2;
    std::vector<double> vals(draws);
    for (auto& v : vals) {
      const Vector x = fixtures::random_point(rng, 2, -box, box);
      const bool inside = std::abs(x(0)) <= 1 && std::abs(x(1)) <= 1;
      v = inside ? 0.0 : 4 * box * box * std::exp(-4 * m_value(k, phi, x));
    }
    const EstimateWithCI e = summarize(vals);
    const auto r = integral_313(k, phi, 4);
    CHECK(std::abs(e.mean - r.value) < 3 * (e.se + r.error));
  }
  SUBCASE("decreasing in n") {
    const auto phi = make_sigma(2, 72);
    double last = INFINITY;
    for (int n : {5, 10, 20}) {
      const double v = integral_313(fixtures::triangle(), phi, n).value;
      CHECK(v < last);
      last = v;
    }
  }
  SUBCASE("translation invariant") {
    const auto phi = make_sigma(2, 72);
    const auto a = integral_313(fixtures::triangle(), phi, 5);
    const auto b = integral_313(fixtures::triangle().translated(vec({0.3, 0.7})), phi, 5);
    CHECK(std::abs(a.value - b.value) <= a.error + b.error);
  }
}

TEST_CASE("conditioned zero cells") {
  const VPolytope k = square(0.2);
  const auto phi = make_sigma(2, 36);
  const ProcessParams p = params_for(2, phi, 11);
  const ConditionalResult c = conditional_zero_cell(k, p, 2000);
  const double q = std::exp(-2 * 2 * phi_functional(k, phi));
  CHECK(c.expected_acceptance == doctest::Approx(q));
  CHECK(std::abs(c.acceptance - q) < 3 * std::sqrt(q * (1 - q) / c.draws));
  CHECK_FALSE(c.low_acceptance);
  for (const auto& s : c.samples)
    for (const auto& v : k.vertices()) CHECK(s.cell.contains(v));

  const KCellSampler direct(k, p);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    Rng rng = Rng::substream(12, i);
    a.push_back(support(c.samples[i].polytope, vec({1, 0})));
    b.push_back(support(direct(rng).polytope, vec({1, 0})));
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);

  const ConditionalResult tiny = conditional_zero_cell(square(1e-4), params_for(1, phi, 3), 500);
  CHECK(tiny.acceptance > 0.99);

  CHECK_THROWS_AS(conditional_zero_cell(fixtures::triangle().translated(vec({0.5, 0.5})), p, 10), Error);
}

TEST_CASE("counts in disjoint windows") {
  const auto phi = make_sigma(2, 12);
  const VPolytope k = square(0.5);
  const KCellSampler s(k, params_for(3, phi, 1, 4.0));
  // Hyperplanes with normal +u_i, i < 4, at distance in [1, 2] resp. [2, 3.5] from the centre.
  auto band = [&](const Halfspace& h, double a, double b) {
    const Halfspace up = h.as_upper();
    for (std::size_t i = 0; i < 4; ++i) {
      if ((up.u - phi.atom(i)).norm() > 1e-12) continue;
      const double t = up.tau - up.u.dot(s.center());
      return t >= a && t < b;
    }
    return false;
  };
  const std::size_t draws = 100000;
  std::vector<std::uint64_t> c1(draws), c2(draws);
  for (std::size_t k2 = 0; k2 < draws; ++k2) {
    Rng rng = Rng::substream(21, k2);
    for (const auto& h : s.draw_hyperplanes(rng)) {
      c1[k2] += band(h, 1.0, 2.0) ? 1 : 0;
      c2[k2] += band(h, 2.0, 3.5) ? 1 : 0;
    }
  }
  double wsum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) wsum += phi.weights()(static_cast<Eigen::Index>(i));
  CHECK(poisson_gof(c1, 2 * 3 * wsum * 1.0).p_value > 0.01);
  CHECK(poisson_gof(c2, 2 * 3 * wsum * 1.5).p_value > 0.01);
  std::vector<double> x1(c1.begin(), c1.end()), x2(c2.begin(), c2.end());
  CHECK(std::abs(correlation(x1, x2)) < 3 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("survival of the support exceeds exp(-n psi)") {
  const auto phi = make_sigma(2, 36);
  const VPolytope k = fixtures::triangle();
  const Vector u = phi.atom(3);
  EstimateOptions o;
  o.reps = 10000;
  o.probes = {u};
  o.keep_records = true;
  const int n = 3;
  const auto est = estimate_functionals(k, params_for(n, phi, 13), o);
  const SeparationMeasure sm(k, phi);
  const double h = support(k, u);
  for (double dt : {0.02, 0.1, 0.25, 0.5, 1.0}) {
    double hits = 0.0;
    for (const auto& r : est.records) hits += r.h[0] >= h + dt ? 1.0 : 0.0;
    const double p = hits / o.reps;
    const double bound = std::exp(-n * sm.psi(Hyperplane(u, h + dt)).value);
    CHECK(p >= bound - 3 * std::sqrt(bound * (1 - bound) / o.reps));
  }
}

TEST_CASE("window size does not bias the estimates") {
  const auto phi = make_sigma(2, 36);
  const VPolytope k = fixtures::triangle();
  EstimateOptions o;
  o.reps = 4000;
  o.probes = {vec({1, 0})};
  o.keep_records = true;
  ProcessParams base = params_for(2, phi, 31);
  const auto a = estimate_functionals(k, base, o);

  SUBCASE("coupled: the doubled window adds only hyperplanes outside the first") {
    ProcessParams doubled = base;
    doubled.initial_doublings = 1;
    const auto b = estimate_functionals(k, doubled, o);
    std::size_t same = 0;
    for (std::size_t i = 0; i < o.reps; ++i)
      same += std::abs(a.records[i].V - b.records[i].V) < 1e-9 && std::abs(a.records[i].h[0] - b.records[i].h[0]) < 1e-9;
    CHECK(same + a.hit_window >= o.reps);
    CHECK(std::abs(a.V.mean - b.V.mean) < a.V.se);
    CHECK(std::abs(a.W.mean - b.W.mean) < a.W.se);
    CHECK(std::abs(a.h[0].mean - b.h[0].mean) < a.h[0].se);
  }
  SUBCASE("independent runs with twice the radius") {
    ProcessParams wide = base;
    wide.radius = 2 * a.radius;
    wide.seed = 32;
    const auto b = estimate_functionals(k, wide, o);
    CHECK(b.radius == doctest::Approx(2 * a.radius));
    CHECK(std::abs(a.V.mean - b.V.mean) < 3 * std::hypot(a.V.se, b.V.se));
    CHECK(std::abs(a.W.mean - b.W.mean) < 3 * std::hypot(a.W.se, b.W.se));
    CHECK(std::abs(a.h[0].mean - b.h[0].mean) < 3 * std::hypot(a.h[0].se, b.h[0].se));
  }
}

TEST_CASE("expected volume decreases in n") {
  const auto phi = make_sigma(2, 36);
  double last = INFINITY;
  for (int n : {1, 2, 4, 8}) {
    EstimateOptions o;
    o.reps = 3000;
    const auto est = estimate_functionals(square(), params_for(n, phi, 41), o);
    CHECK(est.V.upper() < last);
    last = est.V.lower();
  }
}

TEST_CASE("spatial cells") {
  const auto phi = make_axes(3);
  EstimateOptions o;
  o.reps = 3000;
  const auto est = estimate_functionals(fixtures::cube(), params_for(5, phi, 2), o);
  CHECK(std::abs(est.V.mean - 8.0 - 24.768) < 3 * est.V.se);
}
