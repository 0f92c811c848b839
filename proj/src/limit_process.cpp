#include "hcjump/limit_process.hpp"

#include "hcjump/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hcj {

KChainRates k_chain_rates(const Model& model) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.g_count();
    const double hw = grid.cell_weight;

    KChainRates r;
    r.lambda0 = model.rates.lambda0;
    r.landing_cdf.resize(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        acc += model.rates.btilde[i] * hw;
        r.landing_cdf[i] = acc;
    }

    r.exit_rate = model.rates.ctilde;
    r.jump_rate.resize(m);
    r.jump_targets.resize(m);
    Point xi{}, eta{};
    std::vector<double> row(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ci = grid.g_cells[i];
        grid.center(ci, xi);
        double tot = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) {
                row[j] = 0.0;
                continue;
            }
            const std::size_t cj = grid.g_cells[j];
            grid.center(cj, eta);
            row[j] = model.atil_cells(ci, cj) * model.contrast(xi, eta) * hw;
            tot += row[j];
        }
        r.jump_rate[i] = tot;
        r.jump_targets[i] = AliasTable(row);
    }
    return r;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

LimitPath simulate_limit_path(const Model& model, const KChainRates& rates,
                              const Eigen::MatrixXd& theta, const Point& x0, double horizon,
                              RngStream& rng, std::span<const double> sample_times,
                              std::int64_t k0) {
    const int d = model.grid.dim;
    const Eigen::MatrixXd root = psd_sqrt(2.0 * theta);

    LimitPath path;
    Point x = x0;
    std::int64_t k = k0;
    double t = 0.0;
    std::size_t next_sample = 0;
    path.events.push_back({0.0, x, k, false});

    auto diffuse = [&](double dt) {
        if (dt <= 0.0) return;
        Eigen::VectorXd n(d);
        for (int i = 0; i < d; ++i) n[i] = rng.normal();
        const Eigen::VectorXd step = std::sqrt(dt) * (root * n);
        for (int i = 0; i < d; ++i) x[i] += step[i];
    };

    while (t < horizon) {
        double hold;
        if (k < 0) {
            hold = rng.exponential(rates.lambda0);
        } else {
            const double total = rates.exit_rate[k] + rates.jump_rate[k];
            hold = rng.exponential(total);
        }
        const double t_end = std::min(t + hold, horizon);

        // emit samples inside the sojourn, advancing the diffusion piecewise
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t_end) {
            const double ts = sample_times[next_sample];
            if (k < 0) diffuse(ts - t);
            t = ts;
            path.events.push_back({t, x, k, true});
            ++next_sample;
        }
        if (k < 0) diffuse(t_end - t);
        t = t_end;
        if (t >= horizon) break;

        if (k < 0) {
            k = static_cast<std::int64_t>(rng.categorical(rates.landing_cdf));
        } else {
            const double total = rates.exit_rate[k] + rates.jump_rate[k];
            if (rng.uniform() * total < rates.exit_rate[k])
                k = -1;
            else
                k = static_cast<std::int64_t>(rates.jump_targets[k].sample(rng));
        }
        path.events.push_back({t, x, k, false});
    }
    path.events.push_back({horizon, x, k, false});
    return path;
}

LimitEvent limit_state_at(const LimitPath& path, double t) {
    LimitEvent out = path.events.front();
    for (const auto& e : path.events) {
        if (e.t <= t) out = e;
        if (e.t > t) break;
    }
    out.t = t;
    return out;
}

double apply_limit_generator(const Model& model, const Eigen::MatrixXd& theta,
                             const TestFunctionPair& F, const Point& x, std::int64_t k) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.g_count();
    const double hw = grid.cell_weight;
    const double f0x = F.f0.value(x);

    if (k < 0) {
        const Eigen::MatrixXd hess = F.f0.hessian(x);
        double val = (theta.array() * hess.array()).sum();
        for (std::size_t j = 0; j < m; ++j)
            val += model.rates.btilde[j] * (F.g_at_cell(x, j) - f0x) * hw;
        return val;
    }

    const std::size_t idx = static_cast<std::size_t>(k);
    const std::size_t ci = grid.g_cells[idx];
    Point xi{}, eta{};
    grid.center(ci, xi);
    const double gxk = F.g_at_cell(x, idx);
    double val = model.rates.ctilde[idx] * (f0x - gxk);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t cj = grid.g_cells[j];
        grid.center(cj, eta);
        val += model.atil_cells(ci, cj) * model.contrast(xi, eta) * (F.g_at_cell(x, j) - gxk) *
               hw;
    }
    return val;
}

} // namespace hcj
