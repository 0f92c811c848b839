#include "hcjump/geometry.hpp"

#include <cmath>

namespace hcj {

double Region::volume(int dim) const {
    if (kind == Kind::box) {
        double v = 1.0;
        for (int i = 0; i < dim; ++i) v *= (hi[i] - lo[i]);
        return v;
    }
    // ball of radius r in d dims, d <= 3
    switch (dim) {
    case 1: return 2.0 * radius;
    case 2: return M_PI * radius * radius;
    default: return 4.0 / 3.0 * M_PI * radius * radius * radius;
    }
}

bool Region::contains(const Point& xi, int dim) const {
    if (kind == Kind::box) {
        for (int i = 0; i < dim; ++i)
            if (xi[i] < lo[i] || xi[i] > hi[i]) return false;
        return true;
    }
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = xi[i] - center[i];
        r2 += d * d;
    }
    return r2 <= radius * radius;
}

double CellGeometry::measure_g() const {
    double v = 0.0;
    for (const auto& r : g_regions) v += r.volume(dim);
    return v;
}

bool CellGeometry::in_g(const Point& xi) const {
    for (const auto& r : g_regions)
        if (r.contains(xi, dim)) return true;
    return false;
}

Point torus_wrap(const Point& x, int dim) {
    Point out{};
    for (int i = 0; i < dim; ++i) {
        double f = x[i] - std::floor(x[i]);
        if (f >= 1.0) f = 0.0;
        out[i] = f;
    }
    return out;
}

} // namespace hcj
