#include "sepbody/verify.hpp"

#include "parallel.hpp"
#include "sepbody/error.hpp"

#include <chrono>
#include <cmath>

namespace sepbody {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

Verdict judge(const EstimateWithCI& e, std::optional<double> lower, std::optional<double> upper) {
  if (lower && e.upper() < *lower) return Verdict::Fail;
  if (upper && e.lower() > *upper) return Verdict::Fail;
  const bool inside = (!lower || e.lower() >= *lower) && (!upper || e.upper() <= *upper);
  return inside ? Verdict::Pass : Verdict::Inconclusive;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

nlohmann::ordered_json estimate_json(const EstimateWithCI& e) {
  nlohmann::ordered_json j;
  j["mean"] = e.mean;
  j["se"] = e.se;
  j["count"] = e.count;
  j["level"] = e.level;
  j["ci"] = {e.lower(), e.upper()};
  return j;
}

template <class T>
void put(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::size_t default_reps(std::size_t dim) { return dim == 2 ? 10000 : 3000; }

std::string describe(const VPolytope& body, const CheckOptions& o) {
  if (!o.body_label.empty()) return o.body_label;
  return "polytope[" + std::to_string(body.size()) + " vertices, d=" + std::to_string(body.dim()) + "]";
}

TheoremReport header(const char* check, const VPolytope& body, const DirectionalDistribution& phi,
                     int n, std::size_t reps, const CheckOptions& o) {
  TheoremReport r;
  r.check = check;
  r.body = describe(body, o);
  r.phi = phi.label();
  r.n = n;
  r.reps = reps;
  r.seed = o.seed;
  r.level = o.level;
  return r;
}

void finish(TheoremReport& r) {
  r.verdict = Verdict::Pass;
  for (const auto& c : r.comparisons) r.verdict = combine(r.verdict, c.verdict);
}

void validate(const VPolytope& body, const DirectionalDistribution& phi, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "intensity n must be a positive integer");
  if (body.dim() != phi.dim()) throw Error(ErrorKind::InvalidArgument, "body and phi dimensions differ");
  if (body.dim() != 2 && body.dim() != 3) throw Error(ErrorKind::InvalidArgument, "d must be 2 or 3");
  if (!body.is_full_dimensional()) throw Error(ErrorKind::InvalidBody, "body must be full-dimensional");
}

std::vector<Vector> probes_for(const DirectionalDistribution& phi, const CheckOptions& o) {
  std::vector<Vector> probes = o.probes.empty() ? default_probes(phi) : o.probes;
  for (auto& u : probes) {
    const long j = phi.find_expanded(u, 1e-9);
    if (j < 0) throw Error(ErrorKind::InvalidArgument, "probe direction is not an atom of phi");
    u = phi.expanded_directions().col(j);
  }
  return probes;
}

struct Simulation {
  FunctionalEstimates est;
  std::vector<Vector> probes;
  DirectionalDistribution quad;
  double seconds = 0.0;
};

Simulation simulate(const VPolytope& body, const DirectionalDistribution& phi, int n,
                    const CheckOptions& o, bool need_probes) {
  const auto t0 = Clock::now();
  Simulation sim{{}, need_probes ? probes_for(phi, o) : std::vector<Vector>{}, width_quadrature(phi), 0.0};
  ProcessParams params;
  params.n = n;
  params.phi = phi;
  params.radius = o.radius;
  params.seed = o.seed;
  EstimateOptions eo;
  eo.reps = o.reps ? o.reps : default_reps(body.dim());
  eo.probes = sim.probes;
  eo.level = o.level;
  eo.threads = o.threads;
  eo.width_quad = sim.quad;
  sim.est = estimate_functionals(body, params, eo);
  sim.seconds = seconds_since(t0);
  return sim;
}

void add_simulation_info(TheoremReport& r, const Simulation& sim) {
  r.extra["window_radius"] = sim.est.radius;
  r.extra["window_hits"] = sim.est.hit_window;
  r.extra["retries"] = sim.est.retries;
}

TheoremReport report_thm31(const VPolytope& body, const DirectionalDistribution& phi, int n,
                           const CheckOptions& o, const Simulation& sim) {
  const auto t0 = Clock::now();
  TheoremReport r = header("thm31", body, phi, n, sim.est.reps, o);
  r.width_quadrature = sim.quad.label();
  const double vk = volume(body);
  const double vsep = sepbody_volume({body, phi, 1.0 / n}, o.volume);
  const double gap = vsep - vk;
  Comparison c;
  c.quantity = "V";
  c.gap = gap;
  c.lower = o.lower_factor * gap;
  c.estimate = sim.est.V.shifted(-vk);
  c.ratio = c.estimate->mean / gap;
  c.verdict = judge(*c.estimate, c.lower, std::nullopt);
  r.comparisons.push_back(c);
  r.extra["V_body"] = vk;
  r.extra["V_sepbody"] = vsep;
  add_simulation_info(r, sim);
  finish(r);
  r.runtime_seconds = sim.seconds + seconds_since(t0);
  return r;
}

TheoremReport report_thm32(const VPolytope& body, const DirectionalDistribution& phi, int n,
                           const CheckOptions& o, const Simulation& sim) {
  const auto t0 = Clock::now();
  TheoremReport r = header("thm32", body, phi, n, sim.est.reps, o);
  r.width_quadrature = sim.quad.label();
  const SeparationMeasure sm(body, phi);
  for (std::size_t i = 0; i < sim.probes.size(); ++i) {
    const Vector& u = sim.probes[i];
    const double hk = support(body, u);
    const double gap = sm.support(u, 1.0 / n) - hk;
    Comparison c;
    c.quantity = "h";
    c.direction = to_std(u);
    c.gap = gap;
    c.lower = o.lower_factor * gap;
    c.upper = o.upper_factor * gap;
    c.estimate = sim.est.h[i].shifted(-hk);
    c.ratio = c.estimate->mean / gap;
    c.verdict = judge(*c.estimate, c.lower, c.upper);
    r.comparisons.push_back(c);
  }
  add_simulation_info(r, sim);
  finish(r);
  r.runtime_seconds = sim.seconds + seconds_since(t0);
  return r;
}

TheoremReport report_thm33(const VPolytope& body, const DirectionalDistribution& phi, int n,
                           const CheckOptions& o, const Simulation& sim) {
  const auto t0 = Clock::now();
  TheoremReport r = header("thm33", body, phi, n, sim.est.reps, o);
  r.width_quadrature = sim.quad.label();
  const double wk = mean_width(body, sim.quad);
  const double wsep = sepbody_mean_width({body, phi, 1.0 / n}, sim.quad, o.threads);
  const double gap = wsep - wk;
  Comparison c;
  c.quantity = "W";
  c.gap = gap;
  c.lower = o.lower_factor * gap;
  c.upper = o.upper_factor * gap;
  c.estimate = sim.est.W.shifted(-wk);
  c.ratio = c.estimate->mean / gap;
  c.verdict = judge(*c.estimate, c.lower, c.upper);
  r.comparisons.push_back(c);
  r.extra["W_body"] = wk;
  r.extra["W_sepbody"] = wsep;
  add_simulation_info(r, sim);
  finish(r);
  r.runtime_seconds = sim.seconds + seconds_since(t0);
  return r;
}

}  // namespace

nlohmann::ordered_json TheoremReport::to_json(bool include_runtime) const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["body"] = body;
  j["phi"] = phi;
  if (!width_quadrature.empty()) j["width_quadrature"] = width_quadrature;
  j["n"] = n;
  j["reps"] = reps;
  j["seed"] = seed;
  j["level"] = level;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : comparisons) {
    nlohmann::ordered_json e;
    e["quantity"] = c.quantity;
    if (!c.direction.empty()) e["direction"] = c.direction;
    put(e, "gap", c.gap);
    put(e, "lower", c.lower);
    put(e, "upper", c.upper);
    if (c.estimate) e["estimate"] = estimate_json(*c.estimate);
    put(e, "ratio", c.ratio);
    put(e, "p_value", c.p_value);
    put(e, "tolerance", c.tolerance);
    e["verdict"] = to_string(c.verdict);
    list.push_back(std::move(e));
  }
  j["comparisons"] = std::move(list);
  if (!extra.empty()) j["details"] = extra;
  j["verdict"] = to_string(verdict);
  if (include_runtime) j["runtime_seconds"] = runtime_seconds;
  return j;
}

std::vector<Vector> default_probes(const DirectionalDistribution& phi) {
  std::vector<Vector> targets;
  if (phi.dim() == 2) {
    const double s = std::sqrt(0.5);
    targets = {vec({1, 0}), vec({s, s}), vec({-1, 0}), vec({-s, -s})};
  } else {
    const double s = 1.0 / std::sqrt(3.0);
    targets = {vec({1, 0, 0}), vec({s, s, s}), vec({-1, 0, 0}), vec({-s, -s, -s})};
  }
  const Eigen::MatrixXd u = phi.expanded_directions();
  std::vector<Vector> out;
  for (const auto& t : targets) {
    Eigen::Index best = 0;
    (u.transpose() * t).maxCoeff(&best);
    out.push_back(u.col(best));
  }
  return out;
}

TheoremReport check_thm31(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options) {
  validate(body, phi, n);
  return report_thm31(body, phi, n, options, simulate(body, phi, n, options, false));
}

TheoremReport check_thm32(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options) {
  validate(body, phi, n);
  return report_thm32(body, phi, n, options, simulate(body, phi, n, options, true));
}

TheoremReport check_thm33(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options) {
  validate(body, phi, n);
  return report_thm33(body, phi, n, options, simulate(body, phi, n, options, false));
}

std::vector<TheoremReport> run_theorem_suite(const VPolytope& body, const DirectionalDistribution& phi,
                                             int n, const CheckOptions& options) {
  validate(body, phi, n);
  const Simulation sim = simulate(body, phi, n, options, true);
  return {report_thm31(body, phi, n, options, sim), report_thm32(body, phi, n, options, sim),
          report_thm33(body, phi, n, options, sim)};
}

TheoremReport check_eq313(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options) {
  validate(body, phi, n);
  const auto t0 = Clock::now();
  const Simulation sim = simulate(body, phi, n, options, false);
  TheoremReport r = header("eq313", body, phi, n, sim.est.reps, options);
  const double vk = volume(body);
  const IntegralResult integral = integral_313(body, phi, n, options.grid);

  Comparison c;
  c.quantity = "EV-V-integral";
  c.estimate = sim.est.V.shifted(-vk - integral.value);
  c.tolerance = 3.0 * (c.estimate->se + integral.error);
  c.verdict = std::abs(c.estimate->mean) <= *c.tolerance ? Verdict::Pass : Verdict::Fail;
  r.comparisons.push_back(c);

  r.extra["V_body"] = vk;
  r.extra["integral"] = integral.value;
  r.extra["integral_error"] = integral.error;
  r.extra["integral_tail"] = integral.tail;
  r.extra["integral_level"] = integral.level;
  r.extra["grid_resolution"] = integral.resolution;
  add_simulation_info(r, sim);
  finish(r);
  r.runtime_seconds = seconds_since(t0);
  return r;
}

TheoremReport check_conditional(const VPolytope& body, const DirectionalDistribution& phi, int n,
                                const CheckOptions& options) {
  validate(body, phi, n);
  const auto t0 = Clock::now();
  ProcessParams params;
  params.n = n;
  params.phi = phi;
  params.radius = options.radius;
  params.seed = options.seed;
  const ConditionalResult cond = conditional_zero_cell(body, params, options.accept, 1);

  ProcessParams direct_params = params;
  if (options.direct_n > 0) direct_params.n = options.direct_n;
  const KCellSampler direct(body, direct_params);
  std::vector<KCellSample> samples(options.accept);
  detail::parallel_for(options.accept, options.threads, [&](std::size_t k) {
    Rng rng = Rng::substream(options.seed, k, 2);
    samples[k] = direct(rng);
  });

  const DirectionalDistribution quad = width_quadrature(phi);
  const Vector u0 = probes_for(phi, options).front();
  auto features = [&](const std::vector<KCellSample>& s, int which) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& c : s) {
      if (which == 0) out.push_back(support(c.polytope, u0));
      if (which == 1) out.push_back(mean_width(c.polytope, quad));
      if (which == 2) out.push_back(volume(c.polytope));
    }
    return out;
  };

  TheoremReport r = header("conditional", body, phi, n, options.accept, options);
  r.width_quadrature = quad.label();
  const char* names[] = {"h", "W", "V"};
  for (int which = 0; which < 3; ++which) {
    const auto a = features(cond.samples, which);
    const auto b = features(samples, which);
    const TestResult ks = ks_two_sample(a, b);
    Comparison c;
    c.quantity = std::string("ks:") + names[which];
    if (which == 0) c.direction = to_std(u0);
    c.p_value = ks.p_value;
    c.lower = options.alpha;
    c.verdict = ks.p_value > options.alpha ? Verdict::Pass : Verdict::Fail;
    r.comparisons.push_back(c);
  }
  r.extra["draws"] = cond.draws;
  r.extra["acceptance"] = cond.acceptance;
  r.extra["expected_acceptance"] = cond.expected_acceptance;
  r.extra["low_acceptance"] = cond.low_acceptance;
  if (options.direct_n > 0) r.extra["direct_n"] = options.direct_n;
  finish(r);
  r.runtime_seconds = seconds_since(t0);
  return r;
}

}  // namespace sepbody
