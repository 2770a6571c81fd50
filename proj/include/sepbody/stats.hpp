#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace sepbody {

/// Sample mean with a normal-approximation confidence interval.
struct EstimateWithCI {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
  double level = 0.99;

  double half_width() const;
  double lower() const { return mean - half_width(); }
  double upper() const { return mean + half_width(); }
  EstimateWithCI shifted(double offset) const;
};

EstimateWithCI summarize(std::span<const double> values, double level = 0.99);

double normal_quantile(double p);
/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
};

/// Chi-square goodness of fit of integer counts to Poisson(mean); classes
/// are merged from both tails until every expected count is at least 5.
TestResult poisson_gof(std::span<const std::uint64_t> counts, double mean);

/// Two-sample Kolmogorov-Smirnov test (asymptotic distribution with the
/// Stephens small-sample correction).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace sepbody
