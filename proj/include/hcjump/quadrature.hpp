#pragma once

#include <cstddef>
#include <vector>

namespace hcj {

// Gauss-Legendre nodes and weights on [-1,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(std::size_t npts);

// integral of f over [a,b] with an npts rule
template <typename F>
double gauss_integrate(F&& f, double a, double b, std::size_t npts) {
    const GaussRule& r = gauss_legendre(npts);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

} // namespace hcj
