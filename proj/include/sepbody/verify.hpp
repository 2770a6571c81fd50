#pragma once

#include "sepbody/directional.hpp"
#include "sepbody/geometry.hpp"
#include "sepbody/poisson.hpp"
#include "sepbody/separation.hpp"
#include "sepbody/stats.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sepbody {

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);
/// Fail dominates Inconclusive, which dominates Pass.
Verdict combine(Verdict a, Verdict b);

/// Bounds [lower, upper] on a Monte Carlo quantity. Fail if the confidence
/// interval misses the bounds entirely, pass if it lies inside them.
Verdict judge(const EstimateWithCI& e, std::optional<double> lower, std::optional<double> upper);

struct Comparison {
  std::string quantity;
  std::vector<double> direction;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<EstimateWithCI> estimate;
  /// Deterministic separation-body gap the bounds are multiples of.
  std::optional<double> gap;
  /// estimate / gap, recorded without any assertion attached.
  std::optional<double> ratio;
  std::optional<double> p_value;
  std::optional<double> tolerance;
  Verdict verdict = Verdict::Inconclusive;
};

struct TheoremReport {
  std::string check;
  std::string body;
  std::string phi;
  std::string width_quadrature;
  int n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double level = 0.99;
  std::vector<Comparison> comparisons;
  Verdict verdict = Verdict::Inconclusive;
  double runtime_seconds = 0.0;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  /// Runtime is left out unless requested, so that reruns are byte-identical.
  nlohmann::ordered_json to_json(bool include_runtime = false) const;
};

struct CheckOptions {
  /// 0 means 10^4 in the plane and 3000 in space.
  std::size_t reps = 0;
  std::uint64_t seed = 1;
  double level = 0.99;
  unsigned threads = 0;
  double lower_factor = 0.36787944117144233;
  double upper_factor = 1.3678794411714423;
  /// Atom directions for the support check; empty picks the atoms nearest
  /// to four fixed directions.
  std::vector<Vector> probes;
  double radius = 0.0;
  GridSpec grid;
  VolumeOptions volume;
  std::string body_label;
  /// Accepted samples for the conditioning check.
  std::size_t accept = 2000;
  /// If positive, the direct sampler of the conditioning check uses this
  /// intensity instead of n (harness self-test).
  int direct_n = 0;
  double alpha = 0.01;
};

/// Atoms of phi nearest to {e1, (e1+e2)/sqrt2, -e1, -(e1+e2)/sqrt2} in the
/// plane, or {e1, (1,1,1)/sqrt3, -e1, -(1,1,1)/sqrt3} in space.
std::vector<Vector> default_probes(const DirectionalDistribution& phi);

TheoremReport check_thm31(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options = {});
TheoremReport check_thm32(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options = {});
TheoremReport check_thm33(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options = {});
TheoremReport check_eq313(const VPolytope& body, const DirectionalDistribution& phi, int n,
                          const CheckOptions& options = {});
TheoremReport check_conditional(const VPolytope& body, const DirectionalDistribution& phi, int n,
                                const CheckOptions& options = {});

/// The volume, support and mean-width checks from one shared simulation.
std::vector<TheoremReport> run_theorem_suite(const VPolytope& body, const DirectionalDistribution& phi,
                                             int n, const CheckOptions& options = {});

}  // namespace sepbody
