#include "hcjump/field.hpp"

#include <cmath>

namespace hcj {

namespace {

inline bool in_phase(const GridDiscretization& grid, Phase phase, std::size_t cell) {
    return (grid.is_g[cell] != 0) == (phase == Phase::G);
}

inline double value_at(const GridDiscretization& grid, const Eigen::VectorXd& v,
                       std::size_t cell) {
    return v[grid.compact[cell]];
}

double eval_1d(const GridDiscretization& grid, Phase phase, const Eigen::VectorXd& v, double x) {
    const int n = grid.n;
    x -= std::floor(x);
    int c = static_cast<int>(x * n);
    if (c >= n) c = n - 1;
    int idx[1] = {c};
    const std::size_t cell = grid.encode(idx);
    const double t = (x - (c + 0.5) * grid.h) / grid.h; // in [-0.5, 0.5)
    const int side = t >= 0.0 ? 1 : -1;
    int nb[1] = {(c + side + n) % n};
    std::size_t nb_cell = grid.encode(nb);
    if (in_phase(grid, phase, nb_cell))
        return value_at(grid, v, cell) +
               std::abs(t) * (value_at(grid, v, nb_cell) - value_at(grid, v, cell));
    // one-sided extension from the interior neighbour
    int nb2[1] = {(c - side + n) % n};
    const std::size_t nb2_cell = grid.encode(nb2);
    if (in_phase(grid, phase, nb2_cell))
        return value_at(grid, v, cell) +
               std::abs(t) * (value_at(grid, v, cell) - value_at(grid, v, nb2_cell));
    return value_at(grid, v, cell);
}

} // namespace

double eval_field(const GridDiscretization& grid, Phase phase, const Eigen::VectorXd& values,
                  const Point& xi) {
    if (grid.dim == 1) return eval_1d(grid, phase, values, xi[0]);

    // multilinear over the 2^d surrounding centers when the full stencil
    // stays in phase, else nearest center
    const int n = grid.n;
    int base[kMaxDim];
    double frac[kMaxDim];
    for (int k = 0; k < grid.dim; ++k) {
        double g = xi[k] - std::floor(xi[k]);
        g = g * n - 0.5;
        const double fl = std::floor(g);
        base[k] = static_cast<int>(fl);
        frac[k] = g - fl;
    }
    double acc = 0.0;
    bool ok = true;
    const int corners = 1 << grid.dim;
    for (int c = 0; c < corners && ok; ++c) {
        int idx[kMaxDim];
        double wgt = 1.0;
        for (int k = 0; k < grid.dim; ++k) {
            const int bit = (c >> k) & 1;
            idx[k] = ((base[k] + bit) % n + n) % n;
            wgt *= bit ? frac[k] : 1.0 - frac[k];
        }
        const std::size_t cell = grid.encode(idx);
        if (!in_phase(grid, phase, cell)) {
            ok = false;
            break;
        }
        acc += wgt * value_at(grid, values, cell);
    }
    if (ok) return acc;
    const std::size_t cell = grid.cell_of(torus_wrap(xi, grid.dim));
    if (in_phase(grid, phase, cell)) return value_at(grid, values, cell);
    // caller handed a point of the other phase; clamp to nearest in-phase center
    double best = 0.0, bestd = 1e300;
    const auto& cells = phase == Phase::G ? grid.g_cells : grid.y_cells;
    Point ctr{};
    for (std::size_t cc : cells) {
        grid.center(cc, ctr);
        double d2 = 0.0;
        for (int k = 0; k < grid.dim; ++k) {
            double d = std::abs(ctr[k] - (xi[k] - std::floor(xi[k])));
            d = std::min(d, 1.0 - d);
            d2 += d * d;
        }
        if (d2 < bestd) {
            bestd = d2;
            best = value_at(grid, values, cc);
        }
    }
    return best;
}

} // namespace hcj
