#include "hcjump/semigroup.hpp"

#include "hcjump/errors.hpp"
#include "hcjump/rng.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace hcj {

Eigen::MatrixXd GOperator::propagator_spectral(double t) const {
    return evecs * (t * evals.array()).exp().matrix().asDiagonal() * evecs.transpose();
}

Eigen::VectorXd GOperator::apply_propagator(double t, const Eigen::VectorXd& v) const {
    Eigen::VectorXd w = evecs.transpose() * v;
    w.array() *= (t * evals.array()).exp();
    return evecs * w;
}

GOperator assemble_A_G(const Model& model) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.g_count();
    const double hw = grid.cell_weight;

    GOperator op;
    op.B.resize(m, m);
    Point xi{}, eta{};
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ci = grid.g_cells[i];
        grid.center(ci, xi);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t cj = grid.g_cells[j];
            grid.center(cj, eta);
            op.B(i, j) = model.atil_cells(ci, cj) * model.contrast(xi, eta) * hw;
        }
    }
    for (std::size_t i = 0; i < m; ++i) op.B(i, i) -= op.B.row(i).sum();
    op.c = model.rates.ctilde;
    op.A = op.B;
    op.A.diagonal() -= op.c;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.A);
    op.evals = es.eigenvalues();
    op.evecs = es.eigenvectors();
    return op;
}

Eigen::MatrixXd propagator_U(const GOperator& op, double t) {
    return (t * op.A).exp();
}

FeynmanKacResult feynman_kac_estimate(const Model& model, const GOperator& op,
                                      const Eigen::VectorXd& pi1, double t, std::size_t paths,
                                      std::uint64_t seed,
                                      const std::vector<std::size_t>& start_cells) {
    (void)model;
    const std::size_t m = static_cast<std::size_t>(op.B.rows());
    // per-row jump chain: out-rate and target cdf over j != i
    std::vector<double> out_rate(m, 0.0);
    std::vector<std::vector<double>> cdf(m);
    for (std::size_t i = 0; i < m; ++i) {
        cdf[i].resize(m);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) acc += op.B(i, j);
            cdf[i][j] = acc;
        }
        out_rate[i] = acc;
    }

    FeynmanKacResult res;
    res.estimate.resize(start_cells.size());
    res.std_error.resize(start_cells.size());
    for (std::size_t s = 0; s < start_cells.size(); ++s) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            RngStream rng(seed, (s << 40) + p);
            std::size_t state = start_cells[s];
            double remaining = t;
            double logw = 0.0;
            while (true) {
                const double hold =
                    out_rate[state] > 0.0 ? rng.exponential(out_rate[state]) : remaining + 1.0;
                if (hold >= remaining) {
                    logw -= op.c[state] * remaining;
                    break;
                }
                logw -= op.c[state] * hold;
                remaining -= hold;
                state = rng.categorical(cdf[state]);
            }
            const double v = pi1[state] * std::exp(logw);
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / static_cast<double>(paths);
        const double var =
            std::max(0.0, sumsq / static_cast<double>(paths) - mean * mean);
        res.estimate[s] = mean;
        res.std_error[s] = std::sqrt(var / static_cast<double>(paths));
    }
    return res;
}

MemoryKernelTable memory_kernel(const Model& model, const GOperator& op,
                                const std::vector<double>& times) {
    const double hw = model.grid.cell_weight;
    const Eigen::VectorXd bq = op.evecs.transpose() * model.rates.btilde;
    const Eigen::VectorXd cq = op.evecs.transpose() * op.c;

    MemoryKernelTable table;
    table.lambda0 = model.rates.lambda0;
    table.times = times;
    table.values.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        double s = 0.0;
        for (Eigen::Index k = 0; k < bq.size(); ++k)
            s += bq[k] * cq[k] * std::exp(op.evals[k] * t);
        table.values[j] = s * hw;
    }
    return table;
}

Eigen::VectorXd duhamel_g(const Model& model, const GOperator& op, const Eigen::VectorXd& pi1,
                          const Eigen::VectorXd& f0_trace, double t) {
    (void)model;
    const Eigen::Index steps = f0_trace.size() - 1;
    Eigen::VectorXd pq = op.evecs.transpose() * pi1;
    Eigen::VectorXd cq = op.evecs.transpose() * op.c;

    Eigen::VectorXd acc = (t * op.evals.array()).exp().matrix().asDiagonal() * pq;
    if (steps > 0) {
        const double dt = t / static_cast<double>(steps);
        for (Eigen::Index s = 0; s <= steps; ++s) {
            const double wgt = (s == 0 || s == steps) ? 0.5 * dt : dt;
            const double tau = t - static_cast<double>(s) * dt;
            acc.array() += wgt * f0_trace[s] * (tau * op.evals.array()).exp() * cq.array();
        }
    }
    return op.evecs * acc;
}

Eigen::MatrixXd coupled_mode_matrix(const Model& model, const GOperator& op,
                                    const Eigen::MatrixXd& theta, const Point& mode_freq) {
    const std::size_t m = static_cast<std::size_t>(op.A.rows());
    const double hw = model.grid.cell_weight;
    const int d = model.grid.dim;

    double kthetak = 0.0;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) kthetak += mode_freq[r] * theta(r, c) * mode_freq[c];

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m + 1, m + 1);
    M(0, 0) = -kthetak - model.rates.lambda0;
    for (std::size_t j = 0; j < m; ++j) {
        M(0, 1 + j) = model.rates.btilde[j] * hw;
        M(1 + j, 0) = op.c[j];
    }
    M.bottomRightCorner(m, m) = op.A;
    return M;
}

CoupledTrace evolve_coupled(const Model& model, const GOperator& op, const Eigen::MatrixXd& theta,
                            const Point& mode_freq, double f0_init, const Eigen::VectorXd& pi1,
                            double T, double dt) {
    const std::size_t m = static_cast<std::size_t>(op.A.rows());
    const std::size_t steps = T > 0.0 ? static_cast<std::size_t>(std::llround(T / dt)) : 0;
    const double step = steps > 0 ? T / static_cast<double>(steps) : 0.0;

    CoupledTrace out;
    out.times.resize(steps + 1);
    out.f0.resize(steps + 1);
    Eigen::VectorXd w(m + 1);
    w[0] = f0_init;
    w.tail(m) = pi1;
    out.times[0] = 0.0;
    out.f0[0] = f0_init;
    if (steps > 0) {
        const Eigen::MatrixXd M = coupled_mode_matrix(model, op, theta, mode_freq);
        const Eigen::MatrixXd E = (step * M).exp();
        for (std::size_t s = 1; s <= steps; ++s) {
            w = E * w;
            out.times[s] = static_cast<double>(s) * step;
            out.f0[s] = w[0];
        }
    }
    out.g_final = w.tail(m);
    return out;
}

MemoryTrace evolve_memory(const Model& model, const GOperator& op, const Eigen::MatrixXd& theta,
                          const Point& mode_freq, double f0_init, const Eigen::VectorXd& pi1,
                          double T, double dt) {
    const std::size_t steps = T > 0.0 ? static_cast<std::size_t>(std::llround(T / dt)) : 0;
    const double step = steps > 0 ? T / static_cast<double>(steps) : 0.0;
    if (steps > 0 && step * op.r2() > 0.2)
        throw ConvolutionGridTooCoarse("time step too coarse for the kernel decay rate r2");

    const int d = model.grid.dim;
    double kthetak = 0.0;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) kthetak += mode_freq[r] * theta(r, c) * mode_freq[c];
    const double mu = -kthetak - model.rates.lambda0;

    // kernel table and inhomogeneous term on the step grid
    const double hw = model.grid.cell_weight;
    const Eigen::VectorXd bq = op.evecs.transpose() * model.rates.btilde;
    const Eigen::VectorXd cq = op.evecs.transpose() * op.c;
    const Eigen::VectorXd pq = op.evecs.transpose() * pi1;
    Eigen::VectorXd ker(steps + 1), inhom(steps + 1);
    for (std::size_t s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) * step;
        double kv = 0.0, jv = 0.0;
        for (Eigen::Index k = 0; k < bq.size(); ++k) {
            const double e = std::exp(op.evals[k] * t);
            kv += bq[k] * cq[k] * e;
            jv += bq[k] * pq[k] * e;
        }
        ker[s] = kv * hw;
        inhom[s] = jv * hw;
    }

    MemoryTrace out;
    out.times.resize(steps + 1);
    out.f0.resize(steps + 1);
    out.times[0] = 0.0;
    out.f0[0] = f0_init;

    const double emu = std::exp(mu * step);
    std::vector<double> q(steps + 1, 0.0); // q_n = J(t_n) + (K * f0)(t_n)
    q[0] = inhom[0];
    for (std::size_t nstep = 0; nstep + 1 <= steps; ++nstep) {
        const std::size_t np = nstep + 1;
        // trapezoidal convolution at t_{n+1}, implicit in f0[np]
        double conv_known = 0.5 * ker[np] * out.f0[0];
        for (std::size_t j = 1; j < np; ++j) conv_known += ker[np - j] * out.f0[j];
        conv_known *= step;
        const double implicit = 0.5 * step * ker[0];

        const double rhs =
            emu * out.f0[nstep] + 0.5 * step * (emu * q[nstep] + inhom[np] + conv_known);
        const double denom = 1.0 - 0.5 * step * implicit;
        const double fnew = rhs / denom;
        out.f0[np] = fnew;
        out.times[np] = static_cast<double>(np) * step;
        q[np] = inhom[np] + conv_known + implicit * fnew;
    }
    return out;
}

} // namespace hcj
