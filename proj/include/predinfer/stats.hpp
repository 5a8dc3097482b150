#pragma once

#include <functional>
#include <vector>

namespace predinfer::stats {

double std_normal_cdf(double x);

// Inverse of std_normal_cdf, accurate to ~1e-14 on (0, 1).
double std_normal_quantile(double p);

// 2 * (1 - Phi(|t|)), computed via erfc to keep precision in the tails.
double two_sided_p(double t);

double mean(const std::vector<double>& v);

// Midpoint-average convention for even lengths.
double median(std::vector<double> v);

// n-1 divisor; requires at least two values.
double sample_sd(const std::vector<double>& v);
double sample_var(const std::vector<double>& v);

// Type-7 (linear interpolation) empirical quantile, p in [0, 1].
double quantile(std::vector<double> v, double p);

// Kolmogorov-Smirnov sup-distance between the sample and a reference CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_vs_std_normal(std::vector<double> sample);
double ks_vs_uniform01(std::vector<double> sample);

}  // namespace predinfer::stats
