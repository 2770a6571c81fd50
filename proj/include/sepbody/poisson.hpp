#pragma once

#include "sepbody/directional.hpp"
#include "sepbody/geometry.hpp"
#include "sepbody/random.hpp"
#include "sepbody/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sepbody {

/// Stationary Poisson hyperplane process with intensity n and directional
/// distribution phi, observed in a ball window.
struct ProcessParams {
  int n = 1;
  DirectionalDistribution phi;
  /// Window radius about the window centre; 0 picks default_window_radius.
  double radius = 0.0;
  std::uint64_t seed = 0;
  int max_doublings = 5;
  /// Start from radius * 2^k, drawn as the radius-R process plus k shells.
  int initial_doublings = 0;
};

/// 4 max_j h(K - c, u_j) + 8/n, raised to 1.5 max |v - c| when that is larger
/// so that the window always contains K.
double default_window_radius(const VPolytope& body, const DirectionalDistribution& phi, int n,
                             const Vector& center);
double default_window_radius(const VPolytope& body, const DirectionalDistribution& phi, int n);

struct KCellSample {
  /// Generating halfspaces, each containing K (window facets excluded).
  HPolytope cell;
  VPolytope polytope;
  /// The starting window was touched and had to be enlarged.
  bool hit_window = false;
  /// Hyperplanes drawn in the starting window.
  std::size_t count = 0;
  int doublings = 0;
  /// Radius of the window the cell was finally built in.
  double radius = 0.0;
};

/// Draws K-cells. The window is the ball B(c, R) about the vertex centroid c
/// of K. Hyperplanes missing K and meeting the window have total intensity
/// 2n(R - Phi(K)); each picks a stored atom with probability proportional to
/// w_i (2R - width_i) and an offset uniform on the two admissible intervals.
class KCellSampler {
 public:
  KCellSampler(VPolytope body, ProcessParams params);

  KCellSample operator()(Rng& rng) const;
  /// Hyperplanes of the starting window of radius radius(), as halfspaces containing K.
  std::vector<Halfspace> draw_hyperplanes(Rng& rng) const;
  /// Hyperplanes meeting B(c, 2r) but not B(c, r).
  std::vector<Halfspace> draw_shell(Rng& rng, double r) const;
  /// Builds the cell of `halfspaces`, drawn in the window of radius `r`,
  /// enlarging the window while the cell reaches its boundary.
  KCellSample complete(std::vector<Halfspace> halfspaces, double r, Rng& rng) const;

  double mean_count() const { return mean_count_; }
  double radius() const { return radius_; }
  const Vector& center() const { return center_; }
  const VPolytope& body() const { return body_; }
  const ProcessParams& params() const { return params_; }

 private:
  Halfspace make_halfspace(std::size_t atom, double offset) const;

  VPolytope body_;
  ProcessParams params_;
  Vector center_;
  double radius_ = 0.0;
  double mean_count_ = 0.0;
  Eigen::VectorXd upper_;  // h(K - c, u_i)
  Eigen::VectorXd lower_;  // h(K - c, -u_i)
  std::optional<TiltedSampler> core_;
  std::optional<TiltedSampler> shell_;
};

KCellSample sample_kcell(const VPolytope& body, const ProcessParams& params, Rng& rng);
/// K-cell of the single point o.
KCellSample sample_zero_cell(const ProcessParams& params, Rng& rng);

struct EstimateOptions {
  std::size_t reps = 10000;
  std::vector<Vector> probes;
  double level = 0.99;
  /// 0 uses the hardware concurrency.
  unsigned threads = 0;
  bool keep_records = false;
  /// Evaluate probe supports by linear programming over the halfspaces
  /// instead of on the vertex form.
  bool lp_probes = false;
  /// Quadrature for mean widths; width_quadrature(phi) when empty.
  std::optional<DirectionalDistribution> width_quad;
  /// Salt mixed into the replication substreams.
  std::uint64_t salt = 0;
};

struct ReplicationRecord {
  std::size_t seed_index = 0;
  std::size_t count = 0;
  bool hit_window = false;
  int doublings = 0;
  /// Regenerations after a degenerate vertex enumeration.
  int retries = 0;
  double V = 0.0;
  double W = 0.0;
  std::vector<double> h;
};

struct FunctionalEstimates {
  std::vector<EstimateWithCI> h;
  EstimateWithCI W;
  EstimateWithCI V;
  std::size_t reps = 0;
  std::size_t hit_window = 0;
  std::size_t retries = 0;
  double radius = 0.0;
  std::vector<ReplicationRecord> records;
};

/// Replication k draws from Rng::substream(seed, k, salt), so the result does
/// not depend on the thread count.
FunctionalEstimates estimate_functionals(const VPolytope& body, const ProcessParams& params,
                                         const EstimateOptions& options);

struct GridSpec {
  /// Level of the outer body K[phi, T]; 0 means 20 / n.
  double level = 0.0;
  double tolerance = 1e-4;
  int initial = 64;
  /// Finest resolution per axis; 0 means 2048 (d = 2) or 128 (d = 3).
  int max_resolution = 0;
};

struct IntegralResult {
  double value = 0.0;
  /// Change between the last two grid levels plus the tail bound.
  double error = 0.0;
  double tail = 0.0;
  double level = 0.0;
  int resolution = 0;
};

/// Integral of exp(-n m(K,x)) over the complement of K, i.e. E V(Z_K) - V(K).
IntegralResult integral_313(const VPolytope& body, const DirectionalDistribution& phi, int n,
                            const GridSpec& grid = {});

struct ConditionalResult {
  std::vector<KCellSample> samples;
  std::size_t draws = 0;
  double acceptance = 0.0;
  /// exp(-2 n Phi(K)).
  double expected_acceptance = 0.0;
  bool low_acceptance = false;
};

/// Zero cells conditioned on containing K, by rejection. Requires o in int K.
/// Draw j uses Rng::substream(seed, j, salt).
ConditionalResult conditional_zero_cell(const VPolytope& body, const ProcessParams& params,
                                        std::size_t accept, std::uint64_t salt = 0);

}  // namespace sepbody
