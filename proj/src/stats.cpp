#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rwre::stats {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("variance: need >= 2 points");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

MomentSummary summarize(const std::vector<double>& x) {
  MomentSummary out;
  out.n = x.size();
  if (x.size() < 2) throw std::invalid_argument("summarize: need >= 2 points");
  const double n = static_cast<double>(x.size());
  out.mean = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - out.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  out.var = m2 * n / (n - 1.0);
  out.se_mean = std::sqrt(out.var / n);
  const double var_of_var = std::max(0.0, m4 - m2 * m2) / n;
  out.se_var = std::sqrt(var_of_var);
  return out;
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile: empty sample");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= x.size()) return x.back();
  const double frac = pos - static_cast<double>(lo);
  return x[lo] * (1.0 - frac) + x[lo + 1] * frac;
}

double iqr(const std::vector<double>& x) {
  return quantile(x, 0.75) - quantile(x, 0.25);
}

double median(const std::vector<double>& x) { return quantile(x, 0.5); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Series expansion for P(a,x), x < a+1.
static double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a,x), x >= a+1.
static double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double stat, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi2_sf: dof must be positive");
  if (stat <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * stat);
}

double chi2_gof(const std::vector<double>& observed,
                const std::vector<double>& expected, double* stat_out) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi2_gof: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::invalid_argument("chi2_gof: expected <= 0");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  if (stat_out) *stat_out = stat;
  return chi2_sf(stat, static_cast<int>(observed.size()) - 1);
}

double ks_statistic_one_sample(std::vector<double> sample,
                               const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double d, double n_eff) {
  if (d <= 0.0) return 1.0;
  const double rn = std::sqrt(n_eff);
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * lambda * lambda * k * k);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

double ks_test_one_sample(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sample.size());
  const double d = ks_statistic_one_sample(std::move(sample), cdf);
  return ks_pvalue(d, n);
}

double ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  const double n_eff = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                       static_cast<double>(a.size() + b.size());
  const double d = ks_statistic_two_sample(std::move(a), std::move(b));
  return ks_pvalue(d, n_eff);
}

}  // namespace rwre::stats
