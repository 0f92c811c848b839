#include "hcjump/kernel.hpp"

#include "hcjump/errors.hpp"
#include "hcjump/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace hcj {

KernelFamily kernel_family_from_string(const std::string& s) {
    if (s == "box") return KernelFamily::box;
    if (s == "triangle") return KernelFamily::triangle;
    if (s == "truncated-gaussian" || s == "truncated_gaussian")
        return KernelFamily::truncated_gaussian;
    throw IoError("unknown kernel family: " + s);
}

std::string to_string(KernelFamily f) {
    switch (f) {
    case KernelFamily::box: return "box";
    case KernelFamily::triangle: return "triangle";
    default: return "truncated-gaussian";
    }
}

namespace {

// 1d box profile with half values at the jump
inline double box_profile(double t) {
    const double a = std::abs(t);
    if (a < 1.0) return 1.0;
    if (a == 1.0) return 0.5;
    return 0.0;
}

inline double sphere_area(int dim) {
    switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    default: return 4.0 * M_PI;
    }
}

} // namespace

double Kernel::value(const Point& z) const {
    Point u{};
    for (int i = 0; i < dim; ++i) u[i] = z[i] - center[i];
    switch (family) {
    case KernelFamily::box: {
        double v = amplitude;
        for (int i = 0; i < dim; ++i) v *= box_profile(u[i] / radius);
        return v;
    }
    case KernelFamily::triangle: {
        double m = 0.0;
        for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(u[i]));
        return amplitude * std::max(0.0, 1.0 - m / radius);
    }
    default: {
        double r2 = 0.0;
        for (int i = 0; i < dim; ++i) r2 += u[i] * u[i];
        const double r = std::sqrt(r2);
        if (r > radius) return 0.0;
        const double g = amplitude * std::exp(-r2 / (2.0 * width * width));
        return r == radius ? 0.5 * g : g;
    }
    }
}

double Kernel::l1_norm() const {
    switch (family) {
    case KernelFamily::box:
        return amplitude * std::pow(2.0 * radius, dim);
    case KernelFamily::triangle:
        return amplitude * std::pow(2.0, dim) * std::pow(radius, dim) / (dim + 1.0);
    default: {
        const double s = width, R = radius;
        switch (dim) {
        case 1:
            return amplitude * s * std::sqrt(2.0 * M_PI) * std::erf(R / (s * std::sqrt(2.0)));
        case 2:
            return amplitude * 2.0 * M_PI * s * s * (1.0 - std::exp(-R * R / (2.0 * s * s)));
        default:
            return amplitude * std::pow(2.0 * M_PI * s * s, 1.5) *
                   (std::erf(R / (s * std::sqrt(2.0))) -
                    std::sqrt(2.0 / M_PI) * (R / s) * std::exp(-R * R / (2.0 * s * s)));
        }
    }
    }
}

double Kernel::third_moment() const {
    const double R = radius;
    if (family == KernelFamily::box && dim == 1) return amplitude * R * R * R * R / 2.0;
    if (family == KernelFamily::triangle && dim == 1) return amplitude * R * R * R * R / 10.0;
    if (family == KernelFamily::truncated_gaussian) {
        const double s = width;
        auto f = [&](double r) {
            return std::pow(r, dim + 2) * std::exp(-r * r / (2.0 * s * s));
        };
        return amplitude * sphere_area(dim) * gauss_integrate(f, 0.0, R, 64);
    }
    // remaining box/triangle cases: tensor quadrature over the positive orthant
    Point u{};
    const std::size_t npts = 48;
    auto recurse = [&](auto&& self, int axis) -> double {
        if (axis == dim) {
            double r2 = 0.0, m = 0.0;
            for (int i = 0; i < dim; ++i) {
                r2 += u[i] * u[i];
                m = std::max(m, u[i]);
            }
            const double prof =
                family == KernelFamily::box ? 1.0 : std::max(0.0, 1.0 - m / R);
            return std::pow(r2, 1.5) * prof;
        }
        auto g = [&](double x) {
            u[axis] = x;
            return self(self, axis + 1);
        };
        return gauss_integrate(g, 0.0, R, npts);
    };
    return amplitude * std::pow(2.0, dim) * recurse(recurse, 0);
}

double Kernel::support_radius_inf() const {
    double c = 0.0;
    for (int i = 0; i < dim; ++i) c = std::max(c, std::abs(center[i]));
    return radius + c;
}

void Kernel::lower_bound(double& r0, double& c) const {
    switch (family) {
    case KernelFamily::box:
        r0 = radius;
        c = 0.5 * amplitude;
        return;
    case KernelFamily::triangle:
        r0 = 0.5 * radius;
        c = 0.5 * amplitude;
        return;
    default:
        r0 = radius;
        c = 0.5 * amplitude * std::exp(-radius * radius / (2.0 * width * width));
        return;
    }
}

double Kernel::box_mass(const Point& ulo, const Point& uhi) const {
    if (family == KernelFamily::box) {
        double v = amplitude;
        for (int i = 0; i < dim; ++i) {
            const double lo = std::max(ulo[i], center[i] - radius);
            const double hi = std::min(uhi[i], center[i] + radius);
            if (hi <= lo) return 0.0;
            v *= (hi - lo);
        }
        return v;
    }
    // smooth families: 4-point tensor Gauss per axis
    Point u{};
    auto recurse = [&](auto&& self, int axis) -> double {
        if (axis == dim) return value(u);
        auto g = [&](double x) {
            u[axis] = x;
            return self(self, axis + 1);
        };
        return gauss_integrate(g, ulo[axis], uhi[axis], 4);
    };
    return recurse(recurse, 0);
}

namespace {

// inverse CDF of the inf-norm radius density t^{d-1}(1-t/R) on [0,R]
double triangle_radius(double u, int dim, double R) {
    if (dim == 1) return R * (1.0 - std::sqrt(1.0 - u));
    // cdf in tau = t/R: d=2: 3t^2-2t^3, d=3: 4t^3-3t^4; safeguarded Newton
    double lo = 0.0, hi = 1.0, t = 0.5;
    for (int iter = 0; iter < 60; ++iter) {
        double F, dF;
        if (dim == 2) {
            F = t * t * (3.0 - 2.0 * t) - u;
            dF = 6.0 * t * (1.0 - t);
        } else {
            F = t * t * t * (4.0 - 3.0 * t) - u;
            dF = 12.0 * t * t * (1.0 - t);
        }
        if (F > 0)
            hi = t;
        else
            lo = t;
        double step = dF > 1e-14 ? t - F / dF : 0.5 * (lo + hi);
        if (step <= lo || step >= hi) step = 0.5 * (lo + hi);
        if (std::abs(step - t) < 1e-15) {
            t = step;
            break;
        }
        t = step;
    }
    return R * t;
}

} // namespace

void Kernel::sample(RngStream& rng, Point& z) const {
    switch (family) {
    case KernelFamily::box:
        for (int i = 0; i < dim; ++i) z[i] = center[i] + radius * (2.0 * rng.uniform() - 1.0);
        return;
    case KernelFamily::triangle: {
        const double t = triangle_radius(rng.uniform(), dim, radius);
        const double pick = rng.uniform() * dim;
        const int face = std::min(dim - 1, static_cast<int>(pick));
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (int i = 0; i < dim; ++i)
            z[i] = center[i] + (i == face ? sign * t : rng.uniform(-t, t));
        return;
    }
    default: {
        for (int tries = 0; tries < 100000; ++tries) {
            double r2 = 0.0;
            for (int i = 0; i < dim; ++i) {
                z[i] = width * rng.normal();
                r2 += z[i] * z[i];
            }
            if (r2 < radius * radius) {
                for (int i = 0; i < dim; ++i) z[i] += center[i];
                return;
            }
        }
        throw NumericError("SamplerStuck", "truncated-gaussian rejection sampler failed");
    }
    }
}

} // namespace hcj
