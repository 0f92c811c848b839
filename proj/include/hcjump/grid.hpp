#pragma once

#include "hcjump/geometry.hpp"

#include <cstdint>
#include <vector>

namespace hcj {

// Uniform n^d grid on the torus with midpoint quadrature.  Every cell is
// classified as G or Y by its center.
struct GridDiscretization {
    int dim = 1;
    int n = 0;
    std::size_t total = 0;
    double h = 0.0;
    double cell_weight = 0.0; // h^d

    std::vector<std::uint8_t> is_g;       // per cell
    std::vector<std::size_t> y_cells;     // cell ids, ascending
    std::vector<std::size_t> g_cells;     // cell ids, ascending
    std::vector<std::int64_t> compact;    // cell -> index within its phase list

    static GridDiscretization build(const CellGeometry& geom, int n);

    std::size_t y_count() const { return y_cells.size(); }
    std::size_t g_count() const { return g_cells.size(); }
    double measure_y_grid() const { return static_cast<double>(y_cells.size()) * cell_weight; }
    double measure_g_grid() const { return static_cast<double>(g_cells.size()) * cell_weight; }

    void decode(std::size_t cell, int* idx) const {
        for (int i = 0; i < dim; ++i) {
            idx[i] = static_cast<int>(cell % n);
            cell /= n;
        }
    }
    std::size_t encode(const int* idx) const {
        std::size_t c = 0;
        for (int i = dim - 1; i >= 0; --i) c = c * n + static_cast<std::size_t>(idx[i]);
        return c;
    }
    void center(std::size_t cell, Point& xi) const {
        int idx[kMaxDim];
        decode(cell, idx);
        for (int i = 0; i < dim; ++i) xi[i] = (idx[i] + 0.5) * h;
    }
    // cell containing xi in [0,1)^d
    std::size_t cell_of(const Point& xi) const {
        int idx[kMaxDim];
        for (int i = 0; i < dim; ++i) {
            int k = static_cast<int>(xi[i] * n);
            if (k < 0) k = 0;
            if (k >= n) k = n - 1;
            idx[i] = k;
        }
        return encode(idx);
    }
    // wrapped offset id for an integer difference vector
    std::size_t offset_of(const int* diff) const {
        std::size_t c = 0;
        for (int i = dim - 1; i >= 0; --i) {
            int d = diff[i] % n;
            if (d < 0) d += n;
            c = c * n + static_cast<std::size_t>(d);
        }
        return c;
    }
};

} // namespace hcj
