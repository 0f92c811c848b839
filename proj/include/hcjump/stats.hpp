#pragma once

#include "hcjump/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace hcj {

// two-sample Kolmogorov-Smirnov distance (inputs need not be sorted)
double ks_distance(std::vector<double> a, std::vector<double> b);

// one-sample KS statistic against a cdf
double ks_statistic(std::vector<double> data, const std::function<double(double)>& cdf);

// asymptotic Kolmogorov distribution Q(x) = P(D > x * sqrt(n_eff)) complement
double kolmogorov_cdf(double x);

// p-value for a two-sample KS distance
double ks_pvalue_two_sample(double d, std::size_t n, std::size_t m);
// p-value for a one-sample KS statistic
double ks_pvalue_one_sample(double d, std::size_t n);

struct BootstrapBand {
    double lo = 0.0; // 2.5 percentile
    double hi = 0.0; // 97.5 percentile
};
BootstrapBand bootstrap_ks_band(const std::vector<double>& a, const std::vector<double>& b,
                                std::size_t replicates, std::uint64_t seed);

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v); // unbiased

} // namespace hcj
