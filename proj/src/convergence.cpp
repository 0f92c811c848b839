#include "hcjump/convergence.hpp"

#include "hcjump/eps_process.hpp"
#include "hcjump/errors.hpp"

#include <cmath>

namespace hcj {

double project_pi_eps(const Model& model, const TestFunctionPair& F, const Point& x, double eps,
                      PiMode mode) {
    Point xi{};
    const bool fast = eps_point_fast(model, x, eps, &xi);
    if (fast) return F.f0.value(x);
    if (mode == PiMode::sup) return F.g_interp(model, x, xi);

    // cell-average: x-argument averaged over the G copy of the cell of x
    const GridDiscretization& grid = model.grid;
    Point xhat{};
    for (int k = 0; k < grid.dim; ++k) xhat[k] = eps * std::floor(x[k] / eps);
    const double gxi = eval_field(grid, Phase::G, F.g_xi, xi);
    double acc = 0.0, wsum = 0.0;
    Point y{}, ctr{};
    for (std::size_t j = 0; j < grid.g_count(); ++j) {
        grid.center(grid.g_cells[j], ctr);
        for (int k = 0; k < grid.dim; ++k) y[k] = xhat[k] + eps * ctr[k];
        acc += F.gx.value(y) * grid.cell_weight;
        wsum += grid.cell_weight;
    }
    return gxi * acc / wsum;
}

AnsatzEvaluator::AnsatzEvaluator(const EffectiveModel& em, const TestFunctionPair& pair)
    : em_(&em), pair_(&pair) {
    CellOperator op(em.model);
    ZeroMeanSolver solver(op);
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(em.model.grid.g_count());
    kg_ = corrector_K(em.model, solver, 0.0, pair.g_xi).k.values.col(0);
    k1_ = corrector_K(em.model, solver, 1.0, zeros).k.values.col(0);
}

double AnsatzEvaluator::fast_terms(const Point& x, double phi_k[kMaxDim], const double* kappa,
                                   double kg, double k1, double eps) const {
    const TestFunctionPair& F = *pair_;
    const int d = em_->model.grid.dim;
    const double f0 = F.f0.value(x);
    const Point grad = F.f0.gradient(x);
    const Eigen::MatrixXd hess = F.f0.hessian(x);

    double val = f0;
    for (int k = 0; k < d; ++k) val += eps * phi_k[k] * grad[k];
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) val += eps * eps * kappa[c * d + r] * hess(r, c);
    // K corrector enters with the sign that cancels the coupling terms
    val -= eps * eps * (F.gx.value(x) * kg + f0 * k1);
    return val;
}

double AnsatzEvaluator::fast_value_at_cell(const Point& x, std::size_t y_compact,
                                           double eps) const {
    const int d = em_->model.grid.dim;
    double phi_k[kMaxDim] = {0, 0, 0};
    double kappa[kMaxDim * kMaxDim] = {0};
    for (int k = 0; k < d; ++k) phi_k[k] = em_->phi.values(y_compact, k);
    for (int c = 0; c < d * d; ++c) kappa[c] = em_->kappa.values(y_compact, c);
    return fast_terms(x, phi_k, kappa, kg_[y_compact], k1_[y_compact], eps);
}

double AnsatzEvaluator::slow_value(const Point& x, const Point& xi) const {
    return pair_->g_interp(em_->model, x, xi);
}

double AnsatzEvaluator::value(const Point& x, double eps) const {
    const Model& m = em_->model;
    Point xi{};
    const bool fast = eps_point_fast(m, x, eps, &xi);
    if (!fast) return slow_value(x, xi);
    const int d = m.grid.dim;
    double phi_k[kMaxDim] = {0, 0, 0};
    double kappa[kMaxDim * kMaxDim] = {0};
    for (int k = 0; k < d; ++k) phi_k[k] = eval_field(m.grid, Phase::Y, em_->phi.values.col(k), xi);
    for (int c = 0; c < d * d; ++c)
        kappa[c] = eval_field(m.grid, Phase::Y, em_->kappa.values.col(c), xi);
    const double kg = eval_field(m.grid, Phase::Y, kg_, xi);
    const double k1 = eval_field(m.grid, Phase::Y, k1_, xi);
    return fast_terms(x, phi_k, kappa, kg, k1, eps);
}

double limit_row_star(const Model& model, const Eigen::MatrixXd& theta,
                      const TestFunctionPair& F, const Point& x) {
    const GridDiscretization& grid = model.grid;
    const double hw = grid.cell_weight;
    const Eigen::MatrixXd hess = F.f0.hessian(x);
    double val = (theta.array() * hess.array()).sum();
    const double f0x = F.f0.value(x);
    for (std::size_t j = 0; j < grid.g_count(); ++j)
        val += model.rates.btilde[j] * (F.g_at_cell(x, j) - f0x) * hw;
    return val;
}

double limit_row_g(const Model& model, const TestFunctionPair& F, const Point& x,
                   const Point& xi) {
    const GridDiscretization& grid = model.grid;
    const double hw = grid.cell_weight;
    const double gxx = F.g_interp(model, x, xi);
    Point eta{}, diff{};
    double val = 0.0;
    for (std::size_t j = 0; j < grid.g_count(); ++j) {
        grid.center(grid.g_cells[j], eta);
        for (int k = 0; k < grid.dim; ++k) diff[k] = xi[k] - eta[k];
        val += model.folded(diff) * model.contrast(xi, eta) * (F.g_at_cell(x, j) - gxx) * hw;
    }
    // exit rate at the continuum coordinate, same quadrature as the rates
    double ct = 0.0;
    for (std::size_t j = 0; j < grid.y_count(); ++j) {
        grid.center(grid.y_cells[j], eta);
        for (int k = 0; k < grid.dim; ++k) diff[k] = xi[k] - eta[k];
        ct += model.folded(diff) * model.contrast(xi, eta);
    }
    ct *= hw;
    return val + ct * (F.f0.value(x) - gxx);
}

ResidualReport generator_residual(const EffectiveModel& em, const TestFunctionPair& pair,
                                  const std::vector<double>& eps_list,
                                  std::size_t points_per_phase, std::uint64_t seed,
                                  double box_halfwidth) {
    const Model& model = em.model;
    AnsatzEvaluator ansatz(em, pair);

    ResidualReport report;
    report.points_per_phase = points_per_phase;

    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        const double eps = eps_list[ei];
        RngStream rng(seed, ei);

        auto fast_fn = [&](const Point& y) { return ansatz.value(y, eps); };
        auto slow_fn = [&](const Point& y, const Point& eta) {
            return ansatz.slow_value(y, eta);
        };

        double fast_sup = 0.0, slow_sup = 0.0;
        std::size_t fast_seen = 0, slow_seen = 0;
        std::uint64_t guard = 0;
        Point x{};
        while ((fast_seen < points_per_phase || slow_seen < points_per_phase) &&
               guard++ < 200 * points_per_phase) {
            for (int k = 0; k < model.grid.dim; ++k)
                x[k] = rng.uniform(-box_halfwidth, box_halfwidth);
            Point xi{};
            const bool fast = eps_point_fast(model, x, eps, &xi);
            if (fast && fast_seen >= points_per_phase) continue;
            if (!fast && slow_seen >= points_per_phase) continue;

            const double lhs = apply_eps_generator_fn(model, x, eps, fast_fn, slow_fn);
            if (fast) {
                const double rhs = limit_row_star(model, em.theta, pair, x);
                fast_sup = std::max(fast_sup, std::abs(lhs - rhs));
                ++fast_seen;
            } else {
                const double rhs = limit_row_g(model, pair, x, xi);
                slow_sup = std::max(slow_sup, std::abs(lhs - rhs));
                ++slow_seen;
            }
        }
        if (fast_seen < points_per_phase || slow_seen < points_per_phase)
            throw QuadratureUnderResolved("could not populate residual sample sets");
        report.rows.push_back({eps, fast_sup, slow_sup});
    }

    if (report.rows.size() >= 2) {
        std::vector<double> xs, ys;
        for (const auto& row : report.rows) {
            xs.push_back(row.eps);
            ys.push_back(std::max(row.sup(), 1e-300));
        }
        report.slope = loglog_slope(xs, ys);
    }
    return report;
}

LawReport law_distance(const std::vector<double>& times, const std::vector<MarginalSamples>& a,
                       const std::vector<MarginalSamples>& b, std::size_t bootstrap_reps,
                       std::uint64_t seed) {
    if (a.size() != times.size() || b.size() != times.size())
        throw SampleSizeTooSmall("marginal sample lists do not match the time list");
    LawReport rep;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (a[i].x_first.size() < 100 || b[i].x_first.size() < 100)
            throw SampleSizeTooSmall("law comparison needs at least 100 paths per side");
        LawRow row;
        row.t = times[i];
        row.ks = ks_distance(a[i].x_first, b[i].x_first);
        row.band = bootstrap_ks_band(a[i].x_first, b[i].x_first, bootstrap_reps, seed + i);

        auto frac = [](const std::vector<std::uint8_t>& s) {
            double f = 0.0;
            for (auto v : s) f += v ? 1.0 : 0.0;
            return f / static_cast<double>(s.size());
        };
        row.phase_freq_a = frac(a[i].star);
        row.phase_freq_b = frac(b[i].star);
        row.phase_diff = std::abs(row.phase_freq_a - row.phase_freq_b);

        row.mean_a = sample_mean(a[i].x_first);
        row.mean_b = sample_mean(b[i].x_first);
        row.var_a = sample_variance(a[i].x_first);
        row.var_b = sample_variance(b[i].x_first);
        auto cosm = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += std::cos(x);
            return s / static_cast<double>(v.size());
        };
        row.cos_a = cosm(a[i].x_first);
        row.cos_b = cosm(b[i].x_first);
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace hcj
