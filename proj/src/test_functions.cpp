#include "hcjump/test_functions.hpp"

#include <cmath>

namespace hcj {

XProfile XProfile::constant(int dim, double c) {
    XProfile p;
    p.kind = Kind::constant;
    p.dim = dim;
    p.amplitude = c;
    return p;
}

XProfile XProfile::affine(int dim, double offset, const Point& slope) {
    XProfile p;
    p.kind = Kind::affine;
    p.dim = dim;
    p.offset = offset;
    p.slope = slope;
    return p;
}

XProfile XProfile::gaussian(int dim, double amplitude, const Point& center, double sigma,
                            const Point& freq, double phase) {
    XProfile p;
    p.kind = Kind::gauss_cos;
    p.dim = dim;
    p.amplitude = amplitude;
    p.center = center;
    p.sigma = sigma;
    p.freq = freq;
    p.phase = phase;
    return p;
}

double XProfile::value(const Point& x) const {
    switch (kind) {
    case Kind::constant: return amplitude;
    case Kind::affine: {
        double v = offset;
        for (int i = 0; i < dim; ++i) v += slope[i] * x[i];
        return v;
    }
    default: {
        double r2 = 0.0, ph = phase;
        for (int i = 0; i < dim; ++i) {
            const double d = x[i] - center[i];
            r2 += d * d;
            ph += freq[i] * x[i];
        }
        return amplitude * std::exp(-r2 / (2.0 * sigma * sigma)) * std::cos(ph);
    }
    }
}

Point XProfile::gradient(const Point& x) const {
    Point g{};
    switch (kind) {
    case Kind::constant: return g;
    case Kind::affine:
        for (int i = 0; i < dim; ++i) g[i] = slope[i];
        return g;
    default: {
        double r2 = 0.0, ph = phase;
        for (int i = 0; i < dim; ++i) {
            const double d = x[i] - center[i];
            r2 += d * d;
            ph += freq[i] * x[i];
        }
        const double e = std::exp(-r2 / (2.0 * sigma * sigma));
        const double ct = std::cos(ph), st = std::sin(ph);
        for (int i = 0; i < dim; ++i) {
            const double d = x[i] - center[i];
            g[i] = amplitude * e * (-d / (sigma * sigma) * ct - freq[i] * st);
        }
        return g;
    }
    }
}

Eigen::MatrixXd XProfile::hessian(const Point& x) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    if (kind != Kind::gauss_cos) return h;
    double r2 = 0.0, ph = phase;
    for (int i = 0; i < dim; ++i) {
        const double d = x[i] - center[i];
        r2 += d * d;
        ph += freq[i] * x[i];
    }
    const double s2 = sigma * sigma;
    const double e = std::exp(-r2 / (2.0 * s2));
    const double ct = std::cos(ph), st = std::sin(ph);
    for (int i = 0; i < dim; ++i) {
        const double di = x[i] - center[i];
        for (int j = 0; j < dim; ++j) {
            const double dj = x[j] - center[j];
            const double kron = i == j ? 1.0 : 0.0;
            h(i, j) = amplitude * e *
                      ((-kron / s2 + di * dj / (s2 * s2) - freq[i] * freq[j]) * ct +
                       (di * freq[j] + dj * freq[i]) / s2 * st);
        }
    }
    return h;
}

double TestFunctionPair::sup_norm_bound(const Model& model) const {
    (void)model;
    double f0max = std::abs(f0.amplitude) + std::abs(f0.offset);
    double gxmax = std::abs(gx.amplitude) + std::abs(gx.offset);
    const double gximax = g_xi.size() ? g_xi.cwiseAbs().maxCoeff() : 0.0;
    return std::max(f0max, gxmax * gximax);
}

} // namespace hcj
