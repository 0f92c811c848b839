#pragma once

#include "hcjump/grid.hpp"

#include <Eigen/Core>

namespace hcj {

enum class Phase { Y, G };

// Grid function living on the cells of one phase (compact indexing),
// possibly vector- or matrix-valued (one column per component).
struct CellField {
    Phase phase = Phase::Y;
    Eigen::MatrixXd values; // m x ncomp

    int ncomp() const { return static_cast<int>(values.cols()); }
    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

// Piecewise-linear evaluation of a phase field at a continuum torus point.
// In 1d, boundary cells extrapolate from the two nearest in-phase centers;
// in higher dimensions the stencil falls back to the nearest center when a
// corner leaves the phase.
double eval_field(const GridDiscretization& grid, Phase phase, const Eigen::VectorXd& values,
                  const Point& xi);

} // namespace hcj
