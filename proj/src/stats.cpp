#include "hcjump/stats.hpp"

#include "hcjump/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hcj {

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw SampleSizeTooSmall("empty sample in KS distance");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_statistic(std::vector<double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) throw SampleSizeTooSmall("empty sample in KS statistic");
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = cdf(data[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1.18) {
        // Jacobi-theta form, accurate for small arguments
        const double v = std::exp(-M_PI * M_PI / (8.0 * x * x));
        const double s = std::sqrt(2.0 * M_PI) / x;
        return s * (v + std::pow(v, 9) + std::pow(v, 25) + std::pow(v, 49));
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return 1.0 - 2.0 * sum;
}

double ks_pvalue_two_sample(double d, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) /
                      (static_cast<double>(n) + static_cast<double>(m));
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    return 1.0 - kolmogorov_cdf(lam);
}

double ks_pvalue_one_sample(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    return 1.0 - kolmogorov_cdf(lam);
}

BootstrapBand bootstrap_ks_band(const std::vector<double>& a, const std::vector<double>& b,
                                std::size_t replicates, std::uint64_t seed) {
    if (a.size() < 100 || b.size() < 100)
        throw SampleSizeTooSmall("bootstrap needs at least 100 samples per side");
    std::vector<double> stats(replicates);
    std::vector<double> ra(a.size()), rb(b.size());
    for (std::size_t r = 0; r < replicates; ++r) {
        RngStream rng(seed, r);
        for (std::size_t i = 0; i < a.size(); ++i)
            ra[i] = a[static_cast<std::size_t>(rng.uniform() * a.size()) % a.size()];
        for (std::size_t i = 0; i < b.size(); ++i)
            rb[i] = b[static_cast<std::size_t>(rng.uniform() * b.size()) % b.size()];
        stats[r] = ks_distance(ra, rb);
    }
    std::sort(stats.begin(), stats.end());
    BootstrapBand band;
    band.lo = stats[static_cast<std::size_t>(0.025 * static_cast<double>(replicates - 1))];
    band.hi = stats[static_cast<std::size_t>(0.975 * static_cast<double>(replicates - 1))];
    return band;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

} // namespace hcj
