#pragma once

#include "hcjump/geometry.hpp"

#include <array>
#include <vector>

namespace hcj {

// Rate weight w(xi, eta) on the torus, bounded between alpha1 and alpha2.
// kinds: constant value, separable product q(xi) q(eta) with
// q(xi) = base + amp cos(2 pi f . xi), or (d=1) a periodic bilinear table.
struct ContrastField {
    enum class Kind { constant, separable, grid };

    Kind kind = Kind::constant;
    int dim = 1;
    double value = 1.0;

    double q_base = 1.0;
    double q_amp = 0.0;
    std::array<int, kMaxDim> q_freq{};

    int table_n = 0;
    std::vector<double> table; // row-major table_n x table_n, w(xi,eta)

    double operator()(const Point& xi, const Point& eta) const;
    double alpha1() const;
    double alpha2() const;
    bool symmetric() const;

    double q(const Point& xi) const; // separable factor
};

} // namespace hcj
