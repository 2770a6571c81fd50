#include "sepbody/stats.hpp"

#include "sepbody/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace sepbody {

double EstimateWithCI::half_width() const { return normal_quantile(0.5 + 0.5 * level) * se; }

EstimateWithCI EstimateWithCI::shifted(double offset) const {
  EstimateWithCI out = *this;
  out.mean += offset;
  return out;
}

EstimateWithCI summarize(std::span<const double> values, double level) {
  if (values.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0,1)");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  EstimateWithCI out;
  out.mean = mean;
  out.se = std::sqrt(ss / (n - 1.0) / n);
  out.count = values.size();
  out.level = level;
  return out;
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestResult poisson_gof(std::span<const std::uint64_t> counts, double mean) {
  if (counts.empty() || !(mean > 0.0)) throw Error(ErrorKind::InvalidArgument, "need counts and a positive mean");
  const double total = static_cast<double>(counts.size());
  std::map<std::uint64_t, double> observed;
  for (auto c : counts) observed[c] += 1.0;

  const boost::math::poisson_distribution<> dist(mean);
  // Classes [lo, hi] from the 1e-12 quantiles outward, tails folded into the ends.
  auto lo = static_cast<std::uint64_t>(boost::math::quantile(dist, 1e-12));
  auto hi = static_cast<std::uint64_t>(boost::math::quantile(boost::math::complement(dist, 1e-12)));
  struct Bin {
    double expected;
    double observed;
  };
  std::vector<Bin> bins;
  for (std::uint64_t k = lo; k <= hi; ++k) {
    double p = boost::math::pdf(dist, static_cast<double>(k));
    if (k == lo) p = boost::math::cdf(dist, static_cast<double>(k));
    if (k == hi) p = boost::math::cdf(boost::math::complement(dist, static_cast<double>(k) - 1.0));
    bins.push_back({p * total, 0.0});
  }
  for (const auto& [k, n] : observed) {
    const std::uint64_t idx = std::clamp(k, lo, hi) - lo;
    bins[idx].observed += n;
  }
  // Merge from the left until expected >= 5, then from the right.
  std::vector<Bin> merged;
  Bin acc{0.0, 0.0};
  for (const auto& b : bins) {
    acc.expected += b.expected;
    acc.observed += b.observed;
    if (acc.expected >= 5.0) {
      merged.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.expected > 0.0 || acc.observed > 0.0) {
    if (merged.empty()) {
      merged.push_back(acc);
    } else {
      merged.back().expected += acc.expected;
      merged.back().observed += acc.observed;
    }
  }
  TestResult out;
  for (const auto& b : merged) out.statistic += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
  out.dof = static_cast<double>(merged.size()) - 1.0;
  out.p_value = out.dof > 0.0 ? chi_square_sf(out.statistic, out.dof) : 1.0;
  return out;
}

namespace {

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, "KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = n * m / (n + m);
  const double sq = std::sqrt(ne);
  TestResult out;
  out.statistic = d;
  out.p_value = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
  return out;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorKind::InvalidArgument, "need paired samples");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace sepbody
