#pragma once
// Small statistics toolkit shared by the tests and the experiment harness:
// moment summaries with standard errors, quantiles, chi-square and
// Kolmogorov-Smirnov tail probabilities.

#include <cstddef>
#include <functional>
#include <vector>

namespace rwre::stats {

double mean(const std::vector<double>& x);
// Unbiased sample variance (n-1 denominator).
double variance(const std::vector<double>& x);

// Mean and variance with their standard errors. se_var uses the fourth
// central moment: Var(s^2) ~ (m4 - sigma^4)/n.
struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double se_mean = 0.0;
  double var = 0.0;
  double se_var = 0.0;
};
MomentSummary summarize(const std::vector<double>& x);

// Linear-interpolation quantile of an unsorted sample, q in [0,1].
double quantile(std::vector<double> x, double q);
double iqr(const std::vector<double>& x);
double median(const std::vector<double>& x);

double normal_cdf(double z);

// Regularized incomplete gamma functions (series / continued fraction).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Chi-square survival function P(X > stat) with dof degrees of freedom.
double chi2_sf(double stat, int dof);

// Goodness of fit against expected counts (same length, expected > 0).
// Returns the p-value; the statistic is written to *stat_out if non-null.
double chi2_gof(const std::vector<double>& observed,
                const std::vector<double>& expected, double* stat_out = nullptr);

// Kolmogorov-Smirnov.
double ks_statistic_one_sample(std::vector<double> sample,
                               const std::function<double(double)>& cdf);
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);
// Asymptotic Kolmogorov tail with the Stephens small-sample correction;
// n_eff = n for one sample, n*m/(n+m) for two.
double ks_pvalue(double d, double n_eff);
double ks_test_one_sample(std::vector<double> sample,
                          const std::function<double(double)>& cdf);
double ks_test_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace rwre::stats
