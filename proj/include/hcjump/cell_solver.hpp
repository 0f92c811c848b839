#pragma once

#include "hcjump/field.hpp"
#include "hcjump/model.hpp"

#include <Eigen/LU>
#include <Eigen/Core>

#include <complex>
#include <memory>
#include <vector>

namespace hcj {

// Discretization of A^Y u = \int_Y atilde(xi-eta)(u(eta)-u(xi)) deta on the
// Y cells.  Small problems carry a dense matrix; large ones apply the
// convolution part through an FFT on the full torus grid.
class CellOperator {
public:
    CellOperator(const Model& model, std::size_t dense_limit = 4096);

    std::size_t size() const { return alpha_.size(); }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    bool has_dense() const { return dense_.size() > 0; }
    const Eigen::MatrixXd& dense() const { return dense_; }
    const Model& model() const { return *model_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

private:
    void apply_fft(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;

    const Model* model_;
    Eigen::VectorXd alpha_;
    Eigen::MatrixXd dense_;
    // fft workspace (single-threaded solves; see concurrency notes)
    std::vector<std::complex<double>> kernel_hat_;
    mutable std::vector<std::complex<double>> buf_;
    mutable std::vector<std::complex<double>> line_in_, line_out_;
};

CellOperator assemble_AY(const Model& model, std::size_t dense_limit = 4096);

struct ZeroMeanSolution {
    Eigen::VectorXd u;
    double residual_inf = 0.0;
    double compat = 0.0;
};

// Unique zero-mean solution of A^Y u = rhs.  Dense problems factor the
// operator augmented with a Lagrange mean constraint (partial-pivot LU;
// the augmented system is symmetric indefinite); large ones use
// mean-projected conjugate gradients with the FFT apply.
class ZeroMeanSolver {
public:
    explicit ZeroMeanSolver(const CellOperator& op, double compat_tol = 1e-8);
    ZeroMeanSolution solve(const Eigen::VectorXd& rhs) const;
    const CellOperator& op() const { return *op_; }

private:
    const CellOperator* op_;
    double compat_tol_;
    std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

struct PhiResult {
    CellField phi;                 // d components on Y
    std::vector<double> compat;    // per-component solvability integral
    std::vector<double> residual;  // per-component solve residual
};
PhiResult corrector_phi(const Model& model, const ZeroMeanSolver& solver);

struct ThetaResult {
    Eigen::MatrixXd theta;           // defining double integral
    Eigen::MatrixXd theta_identity;  // positive quadratic-form route
    Eigen::MatrixXd theta_bare;      // no-corrector value, diagnostics scale
    double mismatch = 0.0;
    double min_eigenvalue = 0.0;
};
// tol bounds the allowed disagreement of the two routes; pass
// throw_on_mismatch = false to inspect the diagnostic instead.
ThetaResult effective_matrix_theta(const Model& model, const CellField& phi, double tol = 1e-3,
                                   bool throw_on_mismatch = true);
// literal outer-integral-over-copies arrangement, used as a cross-check
Eigen::MatrixXd theta_outer_copies_arrangement(const Model& model, const CellField& phi);

struct KappaResult {
    CellField kappa; // d^2 components on Y, column j*d+i holds kappa_{i,j}
    std::vector<double> compat;
    std::vector<double> residual;
};
KappaResult corrector_kappa(const Model& model, const ZeroMeanSolver& solver,
                            const CellField& phi, const Eigen::MatrixXd& theta);

struct KCorrectorResult {
    CellField k; // scalar on Y
    Eigen::VectorXd psi;
    double compat = 0.0;
    double residual = 0.0;
};
// Solves the zero-mean cell problem A^0 K = Psi built from the value of f0
// and the G slice of g at one spatial point.
KCorrectorResult corrector_K(const Model& model, const ZeroMeanSolver& solver, double f0_value,
                             const Eigen::VectorXd& g_slice);

struct EffectiveModel {
    Model model;
    ConnectivityReport connectivity;
    Eigen::MatrixXd theta;
    Eigen::MatrixXd theta_identity;
    double theta_mismatch = 0.0;
    CellField phi, kappa;
    std::vector<double> phi_compat, kappa_compat;
    std::vector<double> phi_residual, kappa_residual;
};

// full pipeline: connectivity gate, correctors, effective matrix
EffectiveModel solve_effective_model(Model model, double theta_tol = 1e-3,
                                     double compat_tol = 1e-8);

} // namespace hcj
