#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace hcj {

inline constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

inline Point make_point(double x = 0.0, double y = 0.0, double z = 0.0) {
    return Point{x, y, z};
}

// Axis-aligned box or ball inside the unit cell [0,1)^d.
struct Region {
    enum class Kind { box, ball };
    Kind kind = Kind::box;
    Point lo{}, hi{};    // box corners
    Point center{};      // ball
    double radius = 0.0;

    double volume(int dim) const;
    bool contains(const Point& xi, int dim) const;
};

// The periodicity cell: the slow set G is the union of the regions, the
// fast set Y is the complement.  Regions are assumed pairwise disjoint.
struct CellGeometry {
    int dim = 1;
    std::vector<Region> g_regions;

    double measure_g() const;
    double measure_y() const { return 1.0 - measure_g(); }
    bool in_g(const Point& xi) const;
};

// fractional part componentwise, result in [0,1)^d
Point torus_wrap(const Point& x, int dim);

} // namespace hcj
