#pragma once

#include "hcjump/model.hpp"

#include <Eigen/Core>

#include <vector>

namespace hcj {

// dense kernel-part matrix on G: K_ij = atilde(xi_i - xi_j) w(xi_i, xi_j) h^d
Eigen::MatrixXd assemble_K_matrix(const Model& model);
// diag(Phi) - K
Eigen::MatrixXd assemble_phi_minus_K(const Model& model);

// eigenvalues of Phi - K, ascending
Eigen::VectorXd sigma1_eigen(const Model& model);

struct Sigma2Sample {
    double lambda = 0.0;
    double h = 0.0;
    bool flagged = false; // too close to sigma1, solve skipped
};

struct Sigma2Result {
    std::vector<Sigma2Sample> samples;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double guard = 0.0;
    std::vector<double> conflicts; // sigma1 points with the scalar condition negative nearby
};

// h(lambda) = 1 + (btilde, (Phi - K - lambda)^{-1} 1); one dense solve
double resolvent_h(const Model& model, const Eigen::MatrixXd& phi_minus_k, double lambda);

Sigma2Result sigma2_scan(const Model& model, const Eigen::VectorXd& sigma1, double lambda_max,
                         int samples);

struct PerronResult {
    double rho = 0.0;            // power iteration
    double rho_eigensolve = 0.0; // symmetric confirmation
    Eigen::VectorXd g0;          // positive eigenfunction, max-normalized
    double beta1 = 0.0, beta2 = 0.0;
    int iterations = 0;
};
PerronResult spectral_radius_check(const Model& model);

struct SpectralReport {
    Eigen::VectorXd sigma1;
    Sigma2Result sigma2;
    PerronResult perron;
    double phi_min = 0.0, phi_max = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0;
    double gamma1_fold = 0.0, gamma2_fold = 0.0;
};
SpectralReport spectral_report(const Model& model, double lambda_max, int samples);

} // namespace hcj
