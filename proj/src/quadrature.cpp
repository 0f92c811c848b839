#include "hcjump/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace hcj {

namespace {

GaussRule compute_rule(std::size_t n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on Legendre polynomials, Chebyshev initial guess
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(j) + 1.0) * x * p1 - static_cast<double>(j) * p2) /
                     (static_cast<double>(j) + 1.0);
            }
            const double dp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * static_cast<double>(j) + 1.0) * x * p1 - static_cast<double>(j) * p2) /
                 (static_cast<double>(j) + 1.0);
        }
        const double dp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(std::size_t npts) {
    static std::map<std::size_t, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(npts);
    if (it == cache.end()) it = cache.emplace(npts, compute_rule(npts)).first;
    return it->second;
}

} // namespace hcj
