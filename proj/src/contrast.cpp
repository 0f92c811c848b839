#include "hcjump/contrast.hpp"

#include "hcjump/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hcj {

namespace {

double table_interp(const std::vector<double>& t, int n, double x, double y) {
    // periodic bilinear interpolation, nodes at i/n
    const double fx = (x - std::floor(x)) * n;
    const double fy = (y - std::floor(y)) * n;
    const int i0 = static_cast<int>(fx) % n, j0 = static_cast<int>(fy) % n;
    const int i1 = (i0 + 1) % n, j1 = (j0 + 1) % n;
    const double ax = fx - std::floor(fx), ay = fy - std::floor(fy);
    return (1 - ax) * (1 - ay) * t[static_cast<std::size_t>(i0) * n + j0] +
           ax * (1 - ay) * t[static_cast<std::size_t>(i1) * n + j0] +
           (1 - ax) * ay * t[static_cast<std::size_t>(i0) * n + j1] +
           ax * ay * t[static_cast<std::size_t>(i1) * n + j1];
}

} // namespace

double ContrastField::q(const Point& xi) const {
    double phase = 0.0;
    for (int i = 0; i < dim; ++i) phase += q_freq[i] * xi[i];
    return q_base + q_amp * std::cos(2.0 * M_PI * phase);
}

double ContrastField::operator()(const Point& xi, const Point& eta) const {
    switch (kind) {
    case Kind::constant: return value;
    case Kind::separable: return q(xi) * q(eta);
    default: return table_interp(table, table_n, xi[0], eta[0]);
    }
}

double ContrastField::alpha1() const {
    switch (kind) {
    case Kind::constant: return value;
    case Kind::separable: {
        const double qmin = q_base - std::abs(q_amp);
        const double qmax = q_base + std::abs(q_amp);
        const double m = std::min(std::abs(qmin), std::abs(qmax));
        return qmin > 0.0 ? qmin * qmin : -m * m; // negative flags a violation
    }
    default: return table.empty() ? 0.0 : *std::min_element(table.begin(), table.end());
    }
}

double ContrastField::alpha2() const {
    switch (kind) {
    case Kind::constant: return value;
    case Kind::separable: {
        const double qmax = std::max(std::abs(q_base - q_amp), std::abs(q_base + q_amp));
        return qmax * qmax;
    }
    default: return table.empty() ? 0.0 : *std::max_element(table.begin(), table.end());
    }
}

bool ContrastField::symmetric() const {
    if (kind != Kind::grid) return true; // constant and q(xi)q(eta) are symmetric
    for (int i = 0; i < table_n; ++i)
        for (int j = i + 1; j < table_n; ++j)
            if (std::abs(table[static_cast<std::size_t>(i) * table_n + j] -
                         table[static_cast<std::size_t>(j) * table_n + i]) > 1e-12)
                return false;
    return true;
}

} // namespace hcj
