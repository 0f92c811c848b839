#pragma once

#include "hcjump/geometry.hpp"
#include "hcjump/rng.hpp"

#include <string>

namespace hcj {

enum class KernelFamily { box, triangle, truncated_gaussian };

KernelFamily kernel_family_from_string(const std::string& s);
std::string to_string(KernelFamily f);

// Closed-form jump kernel a(z).  Support is the inf-norm ball of `radius`
// for box/triangle and the Euclidean ball for the truncated gaussian.
// At jump discontinuities the kernel takes the half value, so that the
// folded kernel evaluated on grid-difference nodes matches the L1
// representative.
struct Kernel {
    KernelFamily family = KernelFamily::box;
    int dim = 1;
    double radius = 1.0;
    double amplitude = 1.0;
    double width = 1.0; // gaussian standard deviation
    Point center{};     // support shift; nonzero makes the kernel asymmetric

    double value(const Point& z) const;
    double l1_norm() const;
    double third_moment() const; // ∫ |z|_2^3 a(z+center) dz
    double support_radius_inf() const;
    void lower_bound(double& r0, double& c) const; // a >= c on |z|_2 <= r0
    bool symmetric() const { return center[0] == 0.0 && center[1] == 0.0 && center[2] == 0.0; }

    // ∫ a(u) du over the axis-aligned box [ulo, uhi]; exact for the box
    // family, per-axis Gauss quadrature otherwise.
    double box_mass(const Point& ulo, const Point& uhi) const;

    // displacement draw with density a(z)/||a||_1
    void sample(RngStream& rng, Point& z) const;
};

} // namespace hcj
