#pragma once

#include "hcjump/model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace hcj {

// Generator of the G-phase evolution: A = B + C with B the jump part
// (zero row sums) and C multiplication by -ctilde.  A is symmetric on the
// uniform grid, so the propagator is available both through
// scaling-and-squaring and through the cached eigendecomposition.
struct GOperator {
    Eigen::MatrixXd B;
    Eigen::VectorXd c; // potential values ctilde
    Eigen::MatrixXd A;
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;

    double r1() const { return -evals.maxCoeff(); }
    double r2() const { return -evals.minCoeff(); }

    Eigen::MatrixXd propagator_spectral(double t) const;
    Eigen::VectorXd apply_propagator(double t, const Eigen::VectorXd& v) const;
};

GOperator assemble_A_G(const Model& model);

// e^{tA} by scaling-and-squaring (independent of the spectral route)
Eigen::MatrixXd propagator_U(const GOperator& op, double t);

struct FeynmanKacResult {
    Eigen::VectorXd estimate;
    Eigen::VectorXd std_error;
};
// Monte Carlo over the B-chain weighted by exp(-int c along the path),
// one estimate per requested start cell (compact G index).
FeynmanKacResult feynman_kac_estimate(const Model& model, const GOperator& op,
                                      const Eigen::VectorXd& pi1, double t, std::size_t paths,
                                      std::uint64_t seed,
                                      const std::vector<std::size_t>& start_cells);

struct MemoryKernelTable {
    double lambda0 = 0.0;
    std::vector<double> times;
    Eigen::VectorXd values;
};
MemoryKernelTable memory_kernel(const Model& model, const GOperator& op,
                                const std::vector<double>& times);

// Duhamel solution of the G line at time t, f0 sampled on a uniform grid
// over [0, t]
Eigen::VectorXd duhamel_g(const Model& model, const GOperator& op, const Eigen::VectorXd& pi1,
                          const Eigen::VectorXd& f0_trace, double t);

// block generator of the coupled per-mode system (size 1 + m)
Eigen::MatrixXd coupled_mode_matrix(const Model& model, const GOperator& op,
                                    const Eigen::MatrixXd& theta, const Point& mode_freq);

struct CoupledTrace {
    std::vector<double> times;
    Eigen::VectorXd f0;      // trace of the spatial-mode amplitude
    Eigen::VectorXd g_final; // G slice at the final time
};
CoupledTrace evolve_coupled(const Model& model, const GOperator& op, const Eigen::MatrixXd& theta,
                            const Point& mode_freq, double f0_init, const Eigen::VectorXd& pi1,
                            double T, double dt);

struct MemoryTrace {
    std::vector<double> times;
    Eigen::VectorXd f0;
};
// nonlocal-in-time evolution of the spatial mode: exponential integrator
// for the local part, trapezoidal quadrature of the memory convolution
MemoryTrace evolve_memory(const Model& model, const GOperator& op, const Eigen::MatrixXd& theta,
                          const Point& mode_freq, double f0_init, const Eigen::VectorXd& pi1,
                          double T, double dt);

} // namespace hcj
