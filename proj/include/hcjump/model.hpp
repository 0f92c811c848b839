#pragma once

#include "hcjump/contrast.hpp"
#include "hcjump/geometry.hpp"
#include "hcjump/grid.hpp"
#include "hcjump/kernel.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace hcj {

// Periodization of the jump kernel onto the torus, tabulated at grid
// offsets.  Exact for compactly supported kernels.
struct FoldedKernel {
    int dim = 1;
    int n = 0;
    int shift_radius = 0;
    std::vector<double> table; // wrapped-offset lattice sums
    Kernel kernel;

    double at(std::size_t offset) const { return table[offset]; }
    double operator()(const Point& zeta) const; // continuum lattice sum
};

FoldedKernel fold_kernel(const Kernel& kern, const GridDiscretization& grid, double tol);

struct ValidationCheck {
    std::string name;
    bool passed = true;
    double measured = 0.0;
    std::string detail;
    std::string error_code; // nonempty: failing this check is fatal
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_passed() const;
    const ValidationCheck* first_failure() const;
};

ValidationReport validate_inputs(const CellGeometry& geom, const Kernel& kern,
                                 const ContrastField& w,
                                 const GridDiscretization* grid = nullptr);
void ensure_valid(const ValidationReport& report); // throws typed ValidationError

// Connectivity of the periodic extension of Y under the kernel support:
// the quotient graph on Y-cells must be connected and the cycle winding
// vectors must generate the full integer lattice.
struct ConnectivityReport {
    bool quotient_connected = false;
    int winding_rank = 0;
    bool connected = false;
    std::vector<std::array<long long, kMaxDim>> winding_basis;
    long long basis_det = 0;
    std::size_t witness_a = 0, witness_b = 0; // cells in distinct components, if any
    std::string summary() const;
};

ConnectivityReport check_connectivity(const CellGeometry& geom, const Kernel& kern,
                                      const GridDiscretization& grid);

// Rate fields of the limit generator, midpoint quadrature on the shared grid.
struct EffectiveRates {
    Eigen::VectorXd btilde;     // on G cells
    Eigen::VectorXd ctilde;     // on G cells
    Eigen::VectorXd phi_mult;   // Phi on G cells (integral over the whole torus)
    Eigen::VectorXd g_row_mass; // within-G jump rate, on G cells
    Eigen::VectorXd p_y;        // on Y cells
    double lambda0 = 0.0;       // quadrature of btilde over G

    // bounds: gamma via the analytic ||a||_1, *_fold via the folded-kernel quadrature
    double b2 = 0.0, c2 = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0;
    double gamma1_fold = 0.0, gamma2_fold = 0.0;
};

struct Model {
    CellGeometry geometry;
    Kernel kernel;
    ContrastField contrast;
    GridDiscretization grid;
    FoldedKernel folded;
    EffectiveRates rates;

    double atil_cells(std::size_t ci, std::size_t cj) const {
        int a[kMaxDim], b[kMaxDim], d[kMaxDim];
        grid.decode(ci, a);
        grid.decode(cj, b);
        for (int k = 0; k < grid.dim; ++k) d[k] = a[k] - b[k];
        return folded.table[grid.offset_of(d)];
    }
    double w_cells(std::size_t ci, std::size_t cj) const {
        Point xi{}, eta{};
        grid.center(ci, xi);
        grid.center(cj, eta);
        return contrast(xi, eta);
    }
};

EffectiveRates rate_fields(const CellGeometry& geom, const Kernel& kern, const ContrastField& w,
                           const GridDiscretization& grid, const FoldedKernel& folded);

// validate (throws on hard failures), fold, and assemble rate fields
Model build_model(const CellGeometry& geom, const Kernel& kern, const ContrastField& w, int n,
                  double fold_tol = 1e-12);

} // namespace hcj
