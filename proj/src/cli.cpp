#include "sepbody/cli.hpp"

#include "sepbody/error.hpp"
#include "sepbody/io.hpp"
#include "sepbody/poisson.hpp"
#include "sepbody/separation.hpp"
#include "sepbody/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

namespace sepbody::cli {

namespace {

struct ExperimentConfig {
  std::string body;
  std::string phi;
  std::string out;
  std::string format;
  std::string save_body;
  std::uint64_t seed = 1;
  std::size_t reps = 0;
  unsigned threads = 0;
  double level = 0.99;
  int n = 0;
  double delta = 0.0;
  double radius = 0.0;
  std::string point;
  std::string normal;
  std::string direction;
  std::string origin;
  double tau = 0.0;
  std::string method = "lp";
  int rays = 360;
  std::vector<std::string> probes;
  std::string dump;
  bool lp_probes = false;
  std::string check;
  std::size_t accept = 2000;
  int direct_n = 0;
  int grid_resolution = 0;
  double lower_factor = 0.36787944117144233;
  double upper_factor = 1.3678794411714423;
  bool runtime = false;
};

bool input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidBody:
    case ErrorKind::InvalidArgument:
    case ErrorKind::GreatSubsphere:
    case ErrorKind::OrderTooSmall:
    case ErrorKind::AsymmetricBody:
    case ErrorKind::PointInBody:
      return true;
    default:
      return false;
  }
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_number(v(i));
  }
  return s;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::ordered_json estimate_json(const EstimateWithCI& e) {
  nlohmann::ordered_json j;
  j["mean"] = e.mean;
  j["se"] = e.se;
  j["count"] = e.count;
  j["level"] = e.level;
  j["ci"] = {e.lower(), e.upper()};
  return j;
}

class Context {
 public:
  Context(const ExperimentConfig& cfg, std::ostream& out) : cfg_(cfg), out_(&out) {
    if (!cfg.out.empty()) {
      file_.open(cfg.out, std::ios::binary);
      if (!file_) throw Error(ErrorKind::InvalidArgument, "cannot write " + cfg.out);
      out_ = &file_;
    }
  }

  std::ostream& out() { return *out_; }

  const VPolytope& body() {
    if (!body_) {
      if (cfg_.body.empty()) throw Error(ErrorKind::InvalidArgument, "--body is required");
      body_ = load_body(cfg_.body);
      if (!cfg_.save_body.empty()) {
        std::ofstream f(cfg_.save_body, std::ios::binary);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + cfg_.save_body);
        f << body_to_json(*body_).dump(2) << '\n';
      }
    }
    return *body_;
  }

  const DirectionalDistribution& phi() {
    if (!phi_) {
      if (cfg_.phi.empty()) throw Error(ErrorKind::InvalidArgument, "--phi is required");
      phi_ = parse_phi(cfg_.phi);
      if (phi_->dim() != body().dim())
        throw Error(ErrorKind::InvalidArgument, "dimension of --phi does not match the body");
    }
    return *phi_;
  }

  Vector point(const std::string& text, const char* flag) {
    if (text.empty()) throw Error(ErrorKind::InvalidArgument, std::string(flag) + " is required");
    Vector v = parse_point(text);
    if (static_cast<std::size_t>(v.size()) != body().dim())
      throw Error(ErrorKind::InvalidArgument, std::string(flag) + " has the wrong dimension");
    return v;
  }

  std::vector<Vector> probes() {
    if (cfg_.probes.empty()) return default_probes(phi());
    std::vector<Vector> out;
    for (const auto& p : cfg_.probes) out.push_back(point(p, "--probe"));
    return out;
  }

  void scalar(const char* key, double value) {
    if (cfg_.format == "json") {
      nlohmann::ordered_json j;
      j[key] = value;
      out() << j.dump(2) << '\n';
    } else if (cfg_.format == "csv") {
      out() << key << '\n' << format_number(value) << '\n';
    } else {
      out() << format_number(value) << '\n';
    }
  }

  void require_n() const {
    if (cfg_.n < 1) throw Error(ErrorKind::InvalidArgument, "--n must be a positive integer");
  }

 private:
  const ExperimentConfig& cfg_;
  std::ostream* out_;
  std::ofstream file_;
  std::optional<VPolytope> body_;
  std::optional<DirectionalDistribution> phi_;
};

int cmd_mfun(const ExperimentConfig& cfg, Context& ctx) {
  ctx.scalar("m", m_value(ctx.body(), ctx.phi(), ctx.point(cfg.point, "--point")));
  return kExitOk;
}

int cmd_psi(const ExperimentConfig& cfg, Context& ctx) {
  const Hyperplane h(ctx.point(cfg.normal, "--normal"), cfg.tau);
  const PsiResult r = psi_value(h, ctx.body(), ctx.phi());
  if (cfg.format == "json") {
    nlohmann::ordered_json j;
    j["value"] = r.value;
    j["minimizer"] = to_std(r.minimizer);
    ctx.out() << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    ctx.out() << "value,minimizer\n" << format_number(r.value) << ",\"" << join(r.minimizer) << "\"\n";
  } else {
    ctx.out() << format_number(r.value) << '\n' << join(r.minimizer) << '\n';
  }
  return kExitOk;
}

int cmd_support(const ExperimentConfig& cfg, Context& ctx) {
  const SeparationQuery q{ctx.body(), ctx.phi(), cfg.delta};
  const Vector u = ctx.point(cfg.direction, "--direction");
  const double h = cfg.method == "bisection" ? support_sepbody_bisection(q, u) : support_sepbody(q, u);
  ctx.scalar("support", h);
  return kExitOk;
}

int cmd_boundary(const ExperimentConfig& cfg, Context& ctx) {
  if (!(cfg.delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "--delta must be positive");
  const VPolytope& body = ctx.body();
  const SeparationMeasure sm(body, ctx.phi());
  const Vector origin = cfg.origin.empty() ? body.centroid() : ctx.point(cfg.origin, "--origin");
  const std::size_t d = body.dim();
  std::vector<std::pair<double, Vector>> rows;
  for (int k = 0; k < cfg.rays; ++k) {
    const double a = 2.0 * std::numbers::pi * k / cfg.rays;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
    v(0) = std::cos(a);
    v(1) = std::sin(a);
    rows.emplace_back(a, sm.boundary_ray(origin, v, cfg.delta));
  }
  if (cfg.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& [a, x] : rows) j.push_back({{"angle", a}, {"point", to_std(x)}});
    ctx.out() << j.dump(2) << '\n';
  } else {
    ctx.out() << (d == 2 ? "angle,x,y\n" : "angle,x,y,z\n");
    for (const auto& [a, x] : rows) ctx.out() << format_number(a) << ',' << join(x) << '\n';
  }
  return kExitOk;
}

int cmd_kphi(const ExperimentConfig& cfg, Context& ctx) {
  const HPolytope p = k_phi(ctx.body(), ctx.phi());
  if (cfg.format == "csv") {
    ctx.out() << (ctx.body().dim() == 2 ? "u1,u2,tau\n" : "u1,u2,u3,tau\n");
    for (const auto& h : p.halfspaces) {
      const Halfspace up = h.as_upper();
      ctx.out() << join(up.u) << ',' << format_number(up.tau) << '\n';
    }
  } else {
    ctx.out() << hpolytope_to_json(p).dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, Context& ctx) {
  ctx.require_n();
  const VPolytope& body = ctx.body();
  ProcessParams params;
  params.n = cfg.n;
  params.phi = ctx.phi();
  params.radius = cfg.radius;
  params.seed = cfg.seed;
  EstimateOptions eo;
  eo.reps = cfg.reps ? cfg.reps : (body.dim() == 2 ? 10000 : 3000);
  eo.probes = ctx.probes();
  eo.level = cfg.level;
  eo.threads = cfg.threads;
  eo.lp_probes = cfg.lp_probes;
  eo.keep_records = !cfg.dump.empty();
  const FunctionalEstimates est = estimate_functionals(body, params, eo);

  nlohmann::ordered_json j;
  j["body"] = cfg.body;
  j["phi"] = params.phi.label();
  j["n"] = cfg.n;
  j["reps"] = est.reps;
  j["seed"] = cfg.seed;
  j["radius"] = est.radius;
  j["window_hits"] = est.hit_window;
  j["retries"] = est.retries;
  j["h"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < eo.probes.size(); ++i) {
    nlohmann::ordered_json e;
    e["direction"] = to_std(eo.probes[i]);
    e["estimate"] = estimate_json(est.h[i]);
    j["h"].push_back(std::move(e));
  }
  j["W"] = estimate_json(est.W);
  j["V"] = estimate_json(est.V);
  ctx.out() << j.dump(2) << '\n';

  if (!cfg.dump.empty()) {
    std::ofstream f(cfg.dump, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + cfg.dump);
    for (const auto& r : est.records) {
      nlohmann::ordered_json rec;
      rec["seed_index"] = r.seed_index;
      rec["count"] = r.count;
      rec["hit_window"] = r.hit_window;
      rec["V"] = r.V;
      rec["W"] = r.W;
      nlohmann::ordered_json h = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < eo.probes.size(); ++i) h[join(eo.probes[i])] = r.h[i];
      rec["h"] = std::move(h);
      f << rec.dump() << '\n';
    }
  }
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, Context& ctx) {
  ctx.require_n();
  const VPolytope& body = ctx.body();
  const DirectionalDistribution& phi = ctx.phi();
  CheckOptions o;
  o.reps = cfg.reps;
  o.seed = cfg.seed;
  o.level = cfg.level;
  o.threads = cfg.threads;
  o.lower_factor = cfg.lower_factor;
  o.upper_factor = cfg.upper_factor;
  o.radius = cfg.radius;
  o.body_label = cfg.body;
  o.accept = cfg.accept;
  o.direct_n = cfg.direct_n;
  if (cfg.grid_resolution > 0) o.grid.max_resolution = cfg.grid_resolution;
  if (!cfg.probes.empty()) o.probes = ctx.probes();

  std::vector<TheoremReport> reports;
  if (cfg.check == "thm31") reports.push_back(check_thm31(body, phi, cfg.n, o));
  else if (cfg.check == "thm32") reports.push_back(check_thm32(body, phi, cfg.n, o));
  else if (cfg.check == "thm33") reports.push_back(check_thm33(body, phi, cfg.n, o));
  else if (cfg.check == "eq313") reports.push_back(check_eq313(body, phi, cfg.n, o));
  else if (cfg.check == "conditional") reports.push_back(check_conditional(body, phi, cfg.n, o));
  else reports = run_theorem_suite(body, phi, cfg.n, o);

  if (reports.size() == 1) {
    ctx.out() << reports.front().to_json(cfg.runtime).dump(2) << '\n';
  } else {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : reports) j.push_back(r.to_json(cfg.runtime));
    ctx.out() << j.dump(2) << '\n';
  }
  Verdict v = Verdict::Pass;
  for (const auto& r : reports) v = combine(v, r.verdict);
  if (v == Verdict::Fail) return kExitCheckFailed;
  if (v == Verdict::Inconclusive) return kExitInconclusive;
  return kExitOk;
}

int cmd_ellipse(const ExperimentConfig& cfg, Context& ctx) {
  const EllipseArc e = ellipse_params(ctx.body(), ctx.point(cfg.point, "--point"), cfg.delta, ctx.phi());
  if (cfg.format == "csv") {
    ctx.out() << "p,q,axis_sum\n\"" << join(e.p) << "\",\"" << join(e.q) << "\"," << format_number(e.axis_sum) << '\n';
  } else {
    nlohmann::ordered_json j;
    j["p"] = to_std(e.p);
    j["q"] = to_std(e.q);
    j["axis_sum"] = e.axis_sum;
    ctx.out() << j.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  CLI::App app{"Separation bodies and K-cells of Poisson hyperplane processes"};
  app.name("sepbody");
  app.set_config("--config", "", "TOML/INI file with option values; flags given on the command line win");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--body", cfg.body, "Body file (JSON or text vertex list)");
  app.add_option("--phi", cfg.phi, "axes2d, axes3d, sigma2d:<order>, sigma3d:<order>, facets:<bodyfile> or a JSON file");
  app.add_option("--out", cfg.out, "Write primary output here instead of stdout");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--save-body", cfg.save_body, "Write the loaded body as JSON");
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--reps", cfg.reps, "Replications (0: 10^4 in 2D, 3000 in 3D)");
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_option("--level", cfg.level, "Confidence level")->check(CLI::Range(0.5, 0.999999));

  auto* mfun = app.add_subcommand("mfun", "Measure m(K,x) of hyperplanes separating K and x");
  mfun->add_option("--point", cfg.point, "x as comma list")->required();

  auto* psi = app.add_subcommand("psi", "Minimum of m over the hyperplane <x,u> = tau");
  psi->add_option("--normal", cfg.normal, "u as comma list")->required();
  psi->add_option("--tau", cfg.tau, "Offset")->required();

  auto* sup = app.add_subcommand("sepbody-support", "Support function of K[phi,delta]");
  sup->add_option("--delta", cfg.delta, "Level delta")->required()->check(CLI::NonNegativeNumber);
  sup->add_option("--direction", cfg.direction, "u as comma list")->required();
  sup->add_option("--method", cfg.method, "lp or bisection (atom directions only)")
      ->check(CLI::IsMember({"lp", "bisection"}));

  auto* bnd = app.add_subcommand("sepbody-boundary", "Boundary points of K[phi,delta] along rays (CSV angle,x,y[,z])");
  bnd->add_option("--delta", cfg.delta, "Level delta")->required()->check(CLI::PositiveNumber);
  bnd->add_option("--rays", cfg.rays, "Number of rays in the x1x2-plane")->check(CLI::PositiveNumber);
  bnd->add_option("--origin", cfg.origin, "Ray origin inside K (default: vertex centroid)");

  app.add_subcommand("kphi", "Halfspaces of K_phi");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates of E h, E W, E V for the K-cell");
  sim->add_option("--n", cfg.n, "Intensity")->required();
  sim->add_option("--probe", cfg.probes, "Probe direction (repeatable)");
  sim->add_option("--radius", cfg.radius, "Window radius (0: default)");
  sim->add_option("--dump", cfg.dump, "Write one JSON record per replication");
  sim->add_flag("--lp-probes", cfg.lp_probes, "Probe supports by linear programming on the halfspaces");

  auto* ver = app.add_subcommand("verify", "Statistical checks of the K-cell bounds and the volume identity");
  ver->add_option("--check", cfg.check, "Check to run")
      ->required()
      ->check(CLI::IsMember({"thm31", "thm32", "thm33", "eq313", "conditional", "suite"}));
  ver->add_option("--n", cfg.n, "Intensity")->required();
  ver->add_option("--probe", cfg.probes, "Atom direction for the support check (repeatable)");
  ver->add_option("--radius", cfg.radius, "Window radius (0: default)");
  ver->add_option("--accept", cfg.accept, "Accepted samples for the conditioning check");
  ver->add_option("--direct-n", cfg.direct_n, "Intensity of the direct sampler in the conditioning check");
  ver->add_option("--grid", cfg.grid_resolution, "Finest integration grid per axis");
  ver->add_option("--lower-factor", cfg.lower_factor, "Factor of the lower bound");
  ver->add_option("--upper-factor", cfg.upper_factor, "Factor of the upper bound");
  ver->add_flag("--runtime", cfg.runtime, "Include runtime in the report");

  auto* ell = app.add_subcommand("ellipse", "Foci and axis sum of the boundary arc in the region of x");
  ell->add_option("--point", cfg.point, "Witness point outside K")->required();
  ell->add_option("--delta", cfg.delta, "Level delta")->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, ee;
    const int code = app.exit(e, o, ee);
    out << o.str();
    err << ee.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Context ctx(cfg, out);
    if (app.got_subcommand(mfun)) return cmd_mfun(cfg, ctx);
    if (app.got_subcommand(psi)) return cmd_psi(cfg, ctx);
    if (app.got_subcommand(sup)) return cmd_support(cfg, ctx);
    if (app.got_subcommand(bnd)) return cmd_boundary(cfg, ctx);
    if (app.got_subcommand("kphi")) return cmd_kphi(cfg, ctx);
    if (app.got_subcommand(sim)) return cmd_simulate(cfg, ctx);
    if (app.got_subcommand(ver)) return cmd_verify(cfg, ctx);
    if (app.got_subcommand(ell)) return cmd_ellipse(cfg, ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return input_error(e.kind()) ? kExitUsage : kExitSoftware;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSoftware;
  }
  return kExitUsage;
}

}  // namespace sepbody::cli
