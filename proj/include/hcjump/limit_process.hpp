#pragma once

#include "hcjump/model.hpp"
#include "hcjump/rng.hpp"
#include "hcjump/test_functions.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace hcj {

// Discretized jump structure of the k-component on G* = G-cells + star.
struct KChainRates {
    double lambda0 = 0.0;
    std::vector<double> landing_cdf;      // over G cells, for exits from star
    Eigen::VectorXd exit_rate;            // to star, per G cell (ctilde)
    Eigen::VectorXd jump_rate;            // within-G off-diagonal total, per G cell
    std::vector<AliasTable> jump_targets; // per source cell
};

KChainRates k_chain_rates(const Model& model);

struct LimitEvent {
    double t;
    Point x;
    std::int64_t k; // -1 is star, otherwise compact G index
    bool is_sample;
};

struct LimitPath {
    std::vector<LimitEvent> events;
};

// Simulates the two-component limit process: during star intervals the
// spatial component gains Gaussian increments with covariance 2 Theta per
// unit time, otherwise it is frozen while k jumps on the G cells.
LimitPath simulate_limit_path(const Model& model, const KChainRates& rates,
                              const Eigen::MatrixXd& theta, const Point& x0, double horizon,
                              RngStream& rng, std::span<const double> sample_times = {},
                              std::int64_t k0 = -1);

LimitEvent limit_state_at(const LimitPath& path, double t);

// (L F)(x, k) for a test pair; k = -1 selects the star row
double apply_limit_generator(const Model& model, const Eigen::MatrixXd& theta,
                             const TestFunctionPair& F, const Point& x, std::int64_t k);

// symmetric positive semidefinite square root, used for the increment map
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

} // namespace hcj
