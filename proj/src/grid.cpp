#include "hcjump/grid.hpp"

namespace hcj {

GridDiscretization GridDiscretization::build(const CellGeometry& geom, int n) {
    GridDiscretization g;
    g.dim = geom.dim;
    g.n = n;
    g.total = 1;
    for (int i = 0; i < geom.dim; ++i) g.total *= static_cast<std::size_t>(n);
    g.h = 1.0 / n;
    g.cell_weight = 1.0;
    for (int i = 0; i < geom.dim; ++i) g.cell_weight *= g.h;

    g.is_g.resize(g.total);
    g.compact.assign(g.total, -1);
    Point xi{};
    for (std::size_t c = 0; c < g.total; ++c) {
        g.center(c, xi);
        const bool ing = geom.in_g(xi);
        g.is_g[c] = ing ? 1 : 0;
        if (ing) {
            g.compact[c] = static_cast<std::int64_t>(g.g_cells.size());
            g.g_cells.push_back(c);
        } else {
            g.compact[c] = static_cast<std::int64_t>(g.y_cells.size());
            g.y_cells.push_back(c);
        }
    }
    return g;
}

} // namespace hcj
