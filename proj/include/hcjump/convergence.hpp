#pragma once

#include "hcjump/cell_solver.hpp"
#include "hcjump/stats.hpp"
#include "hcjump/test_functions.hpp"

#include <cstdint>
#include <vector>

namespace hcj {

enum class PiMode { sup, cell_average };

// projection of a test pair onto the eps-scale state space at x
double project_pi_eps(const Model& model, const TestFunctionPair& F, const Point& x, double eps,
                      PiMode mode);

// Corrector expansion F_eps built from a solved effective model.  The fast
// branch carries the phi, kappa and K correctors; the slow branch is the g
// component.  The separable structure of g reduces the K corrector to two
// cell solves shared by all spatial points.
class AnsatzEvaluator {
public:
    AnsatzEvaluator(const EffectiveModel& em, const TestFunctionPair& pair);

    double value(const Point& x, double eps) const;
    double fast_value_at_cell(const Point& x, std::size_t y_compact, double eps) const;
    double slow_value(const Point& x, const Point& xi) const;

    const EffectiveModel& effective_model() const { return *em_; }
    const TestFunctionPair& pair() const { return *pair_; }

private:
    double fast_terms(const Point& x, double phi_k[kMaxDim], const double* kappa,
                      double kg, double k1, double eps) const;

    const EffectiveModel* em_;
    const TestFunctionPair* pair_;
    Eigen::VectorXd kg_, k1_; // K corrector for the g slice and the unit f0
};

struct ResidualRow {
    double eps;
    double fast_sup;
    double slow_sup;
    double sup() const { return fast_sup > slow_sup ? fast_sup : slow_sup; }
};

struct ResidualReport {
    std::vector<ResidualRow> rows;
    double slope = 0.0; // fitted log-log decay order of the combined sup
    std::size_t points_per_phase = 0;
};

// sup over randomized phase samples of |hat L_eps F_eps - pi_eps L F|
ResidualReport generator_residual(const EffectiveModel& em, const TestFunctionPair& pair,
                                  const std::vector<double>& eps_list,
                                  std::size_t points_per_phase, std::uint64_t seed,
                                  double box_halfwidth = 2.0);

// limit-generator rows evaluated at a continuum cell coordinate
double limit_row_star(const Model& model, const Eigen::MatrixXd& theta,
                      const TestFunctionPair& F, const Point& x);
double limit_row_g(const Model& model, const TestFunctionPair& F, const Point& x,
                   const Point& xi);

struct MarginalSamples {
    std::vector<double> x_first;      // first spatial coordinate
    std::vector<std::uint8_t> star;   // phase indicator
};

struct LawRow {
    double t = 0.0;
    double ks = 0.0;
    BootstrapBand band;
    double phase_freq_a = 0.0, phase_freq_b = 0.0, phase_diff = 0.0;
    double mean_a = 0.0, mean_b = 0.0;
    double var_a = 0.0, var_b = 0.0;
    double cos_a = 0.0, cos_b = 0.0;
};

struct LawReport {
    std::vector<LawRow> rows;
};

LawReport law_distance(const std::vector<double>& times, const std::vector<MarginalSamples>& a,
                       const std::vector<MarginalSamples>& b, std::size_t bootstrap_reps,
                       std::uint64_t seed);

} // namespace hcj
