#include "hcjump/cell_solver.hpp"

#include "hcjump/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

namespace hcj {

namespace {

// visit all unwrapped targets eta in Y-sharp seen from the center of a
// source cell; fn(target_compact_index, delta = xi - eta, kernel_value)
template <typename Fn>
void for_each_ysharp_target(const Model& m, std::size_t source_cell, Fn&& fn) {
    const GridDiscretization& grid = m.grid;
    const int n = grid.n;
    const double R = m.kernel.support_radius_inf();
    const int reach = static_cast<int>(std::ceil(R / grid.h)) + 1;
    int ic[kMaxDim], tc[kMaxDim], wrapped[kMaxDim];
    Point delta{};
    grid.decode(source_cell, ic);

    int span = 1;
    for (int k = 0; k < grid.dim; ++k) span *= 2 * reach + 1;
    for (int t = 0; t < span; ++t) {
        int rem = t;
        for (int k = 0; k < grid.dim; ++k) {
            tc[k] = ic[k] + rem % (2 * reach + 1) - reach;
            rem /= (2 * reach + 1);
            int w = tc[k] % n;
            if (w < 0) w += n;
            wrapped[k] = w;
        }
        const std::size_t cj = grid.encode(wrapped);
        if (grid.is_g[cj]) continue;
        // integer-difference form keeps paired deltas bit-exact negatives,
        // so half-weight kernel boundaries stay symmetric when h is inexact
        for (int k = 0; k < grid.dim; ++k) delta[k] = (ic[k] - tc[k]) * grid.h;
        const double a = m.kernel.value(delta);
        if (a == 0.0) continue;
        fn(static_cast<std::size_t>(grid.compact[cj]), delta, a);
    }
}

} // namespace

CellOperator::CellOperator(const Model& model, std::size_t dense_limit) : model_(&model) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.y_count();
    alpha_ = model.rates.p_y;

    if (m <= dense_limit) {
        dense_.resize(m, m);
        const double hw = grid.cell_weight;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j)
                dense_(i, j) = model.atil_cells(grid.y_cells[i], grid.y_cells[j]) * hw;
            dense_(i, i) -= alpha_[i];
        }
        return;
    }

    // FFT route: spectrum of the folded-kernel offset table on the full grid
    const std::size_t N = grid.total;
    kernel_hat_.assign(N, {0.0, 0.0});
    for (std::size_t i = 0; i < N; ++i) kernel_hat_[i] = model.folded.table[i];
    buf_.assign(N, {0.0, 0.0});
    line_in_.assign(grid.n, {0.0, 0.0});
    line_out_.assign(grid.n, {0.0, 0.0});

    Eigen::FFT<double> fft;
    auto transform_axis = [&](std::vector<std::complex<double>>& data, int axis, bool inverse) {
        const std::size_t n = static_cast<std::size_t>(grid.n);
        std::size_t stride = 1;
        for (int k = 0; k < axis; ++k) stride *= n;
        const std::size_t lines = N / n;
        for (std::size_t l = 0; l < lines; ++l) {
            const std::size_t base = (l / stride) * stride * n + (l % stride);
            for (std::size_t t = 0; t < n; ++t) line_in_[t] = data[base + t * stride];
            if (inverse)
                fft.inv(line_out_, line_in_);
            else
                fft.fwd(line_out_, line_in_);
            for (std::size_t t = 0; t < n; ++t) data[base + t * stride] = line_out_[t];
        }
    };
    for (int axis = 0; axis < grid.dim; ++axis) transform_axis(kernel_hat_, axis, false);
}

void CellOperator::apply_fft(const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
    const GridDiscretization& grid = model_->grid;
    const std::size_t N = grid.total;
    const std::size_t n = static_cast<std::size_t>(grid.n);

    std::fill(buf_.begin(), buf_.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t j = 0; j < grid.y_count(); ++j) buf_[grid.y_cells[j]] = u[j];

    Eigen::FFT<double> fft;
    auto transform_axis = [&](int axis, bool inverse) {
        std::size_t stride = 1;
        for (int k = 0; k < axis; ++k) stride *= n;
        const std::size_t lines = N / n;
        for (std::size_t l = 0; l < lines; ++l) {
            const std::size_t base = (l / stride) * stride * n + (l % stride);
            for (std::size_t t = 0; t < n; ++t) line_in_[t] = buf_[base + t * stride];
            if (inverse)
                fft.inv(line_out_, line_in_);
            else
                fft.fwd(line_out_, line_in_);
            for (std::size_t t = 0; t < n; ++t) buf_[base + t * stride] = line_out_[t];
        }
    };
    for (int axis = 0; axis < grid.dim; ++axis) transform_axis(axis, false);
    for (std::size_t i = 0; i < N; ++i) buf_[i] *= kernel_hat_[i];
    for (int axis = 0; axis < grid.dim; ++axis) transform_axis(axis, true);

    const double hw = grid.cell_weight;
    for (std::size_t j = 0; j < grid.y_count(); ++j)
        out[j] = hw * buf_[grid.y_cells[j]].real() - alpha_[j] * u[j];
}

Eigen::VectorXd CellOperator::apply(const Eigen::VectorXd& u) const {
    if (has_dense()) return dense_ * u;
    Eigen::VectorXd out(u.size());
    apply_fft(u, out);
    return out;
}

CellOperator assemble_AY(const Model& model, std::size_t dense_limit) {
    return CellOperator(model, dense_limit);
}

ZeroMeanSolver::ZeroMeanSolver(const CellOperator& op, double compat_tol)
    : op_(&op), compat_tol_(compat_tol) {
    if (!op.has_dense()) return;
    const std::size_t m = op.size();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(m + 1, m + 1);
    aug.topLeftCorner(m, m) = op.dense();
    aug.col(m).head(m).setOnes();
    aug.row(m).head(m).setOnes();
    lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(aug);
}

ZeroMeanSolution ZeroMeanSolver::solve(const Eigen::VectorXd& rhs) const {
    const std::size_t m = op_->size();
    const double hw = op_->model().grid.cell_weight;
    ZeroMeanSolution out;
    out.compat = rhs.sum() * hw;
    const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    if (std::abs(out.compat) > compat_tol_ * scale) {
        std::ostringstream msg;
        msg << "right-hand side breaks solvability: integral " << out.compat << " exceeds "
            << compat_tol_ * scale;
        throw CompatibilityViolated(msg.str());
    }

    if (lu_) {
        Eigen::VectorXd aug(m + 1);
        aug.head(m) = rhs;
        aug[m] = 0.0;
        Eigen::VectorXd sol = lu_->solve(aug);
        out.u = sol.head(m);
        out.u.array() -= out.u.mean();
    } else {
        // mean-projected preconditioned CG on the positive semidefinite -A
        Eigen::VectorXd b = -rhs;
        b.array() -= b.mean();
        Eigen::VectorXd precond = op_->alpha();
        const double diag0 =
            op_->model().folded.table[0] * hw; // self-offset of the convolution part
        precond.array() -= diag0;
        const double floor = 1e-12 * precond.maxCoeff();
        precond = precond.cwiseMax(floor);

        Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd r = b;
        Eigen::VectorXd z = r.cwiseQuotient(precond);
        z.array() -= z.mean();
        Eigen::VectorXd p = z;
        double rz = r.dot(z);
        const double btol = 1e-13 * std::max(1e-300, b.norm());
        bool converged = r.norm() <= btol;
        for (int iter = 0; iter < 20000 && !converged; ++iter) {
            Eigen::VectorXd q = -op_->apply(p);
            const double pq = p.dot(q);
            if (!(pq > 0.0))
                throw SingularSystem("cell-problem CG lost positivity; run check_connectivity");
            const double a = rz / pq;
            x += a * p;
            r -= a * q;
            if (r.norm() <= btol) {
                converged = true;
                break;
            }
            z = r.cwiseQuotient(precond);
            z.array() -= z.mean();
            const double rz_new = r.dot(z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        if (!converged)
            throw SingularSystem("cell-problem CG did not converge; run check_connectivity");
        out.u = x;
        out.u.array() -= out.u.mean();
    }

    out.residual_inf = (op_->apply(out.u) - rhs).lpNorm<Eigen::Infinity>();
    if (out.residual_inf > 1e-6 * scale)
        throw SingularSystem("cell solve residual too large; run check_connectivity");
    return out;
}

PhiResult corrector_phi(const Model& model, const ZeroMeanSolver& solver) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.y_count();
    const int d = grid.dim;
    const double hw = grid.cell_weight;

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, d);
    for (std::size_t i = 0; i < m; ++i) {
        for_each_ysharp_target(model, grid.y_cells[i],
                               [&](std::size_t, const Point& delta, double a) {
                                   for (int k = 0; k < d; ++k) rhs(i, k) += a * delta[k] * hw;
                               });
    }

    PhiResult res;
    res.phi.phase = Phase::Y;
    res.phi.values.resize(m, d);
    for (int k = 0; k < d; ++k) {
        ZeroMeanSolution sol = solver.solve(rhs.col(k));
        res.phi.values.col(k) = sol.u;
        res.compat.push_back(sol.compat);
        res.residual.push_back(sol.residual_inf);
    }
    return res;
}

ThetaResult effective_matrix_theta(const Model& model, const CellField& phi, double tol,
                                   bool throw_on_mismatch) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.y_count();
    const int d = grid.dim;
    const double hw2 = grid.cell_weight * grid.cell_weight;
    const double ymeas = grid.measure_y_grid();

    // identity bracket: phi(xi) - phi(eta) + (xi - eta); squared form equals
    // the defining compatibility integral and certifies positive definiteness
    Eigen::MatrixXd acc_def = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd acc_id = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd acc_bare = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < m; ++i) {
        for_each_ysharp_target(
            model, grid.y_cells[i], [&](std::size_t j, const Point& delta, double a) {
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) {
                        acc_def(r, c) +=
                            a * (0.5 * delta[r] * delta[c] - delta[r] * phi.values(j, c));
                        acc_bare(r, c) += 0.5 * a * delta[r] * delta[c];
                        const double vr = phi.values(i, r) - phi.values(j, r) + delta[r];
                        const double vc = phi.values(i, c) - phi.values(j, c) + delta[c];
                        acc_id(r, c) += 0.5 * a * vr * vc;
                    }
            });
    }

    ThetaResult res;
    res.theta = acc_def * hw2 / ymeas;
    res.theta_identity = acc_id * hw2 / ymeas;
    res.theta_bare = acc_bare * hw2 / ymeas;
    res.mismatch = (res.theta - res.theta_identity).lpNorm<Eigen::Infinity>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (res.theta + res.theta.transpose()));
    res.min_eigenvalue = es.eigenvalues().minCoeff();

    if (throw_on_mismatch) {
        const double scale = std::max(1.0, res.theta.lpNorm<Eigen::Infinity>());
        if (res.mismatch > tol * scale) {
            std::ostringstream msg;
            msg << "effective-matrix routes disagree: defining integral vs quadratic identity "
                << "differ by " << res.mismatch << "; run check_connectivity";
            throw ThetaMismatch(msg.str());
        }
        // a trapped corrector collapses both routes to zero: flag the loss of
        // positive definiteness against the no-corrector scale
        const double pd_floor = 1e-6 * res.theta_bare.trace() / d;
        if (res.min_eigenvalue <= pd_floor) {
            std::ostringstream msg;
            msg << "effective matrix lost positive definiteness (min eigenvalue "
                << res.min_eigenvalue << " vs free-motion scale " << res.theta_bare.trace() / d
                << "); this is the connectivity-violation signature, run check_connectivity";
            throw ThetaMismatch(msg.str());
        }
    }
    return res;
}

Eigen::MatrixXd theta_outer_copies_arrangement(const Model& model, const CellField& phi) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.y_count();
    const int d = grid.dim;
    const double hw2 = grid.cell_weight * grid.cell_weight;
    const int S = static_cast<int>(std::ceil(model.kernel.support_radius_inf())) + 1;

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    Point delta{};
    int ci[kMaxDim], cj[kMaxDim];
    int span = 1;
    for (int k = 0; k < d; ++k) span *= 2 * S + 1;
    for (int s = 0; s < span; ++s) {
        int shift[kMaxDim] = {0, 0, 0};
        int rem = s;
        for (int k = 0; k < d; ++k) {
            shift[k] = rem % (2 * S + 1) - S;
            rem /= (2 * S + 1);
        }
        for (std::size_t i = 0; i < m; ++i) {
            grid.decode(grid.y_cells[i], ci);
            for (std::size_t j = 0; j < m; ++j) {
                grid.decode(grid.y_cells[j], cj);
                for (int k = 0; k < d; ++k)
                    delta[k] = (ci[k] + shift[k] * grid.n - cj[k]) * grid.h;
                const double a = model.kernel.value(delta);
                if (a == 0.0) continue;
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        acc(r, c) +=
                            a * (0.5 * delta[r] * delta[c] - delta[r] * phi.values(j, c));
            }
        }
    }
    return acc * hw2 / grid.measure_y_grid();
}

KappaResult corrector_kappa(const Model& model, const ZeroMeanSolver& solver,
                            const CellField& phi, const Eigen::MatrixXd& theta) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.y_count();
    const int d = grid.dim;
    const double hw = grid.cell_weight;

    KappaResult res;
    res.kappa.phase = Phase::Y;
    res.kappa.values.resize(m, d * d);
    Eigen::MatrixXd rhs(m, d * d);
    for (std::size_t i = 0; i < m; ++i) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
        for_each_ysharp_target(
            model, grid.y_cells[i], [&](std::size_t j, const Point& delta, double a) {
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        acc(r, c) += a * (0.5 * delta[r] * delta[c] - delta[r] * phi.values(j, c));
            });
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) rhs(i, c * d + r) = theta(r, c) - acc(r, c) * hw;
    }
    for (int comp = 0; comp < d * d; ++comp) {
        ZeroMeanSolution sol = solver.solve(rhs.col(comp));
        res.kappa.values.col(comp) = sol.u;
        res.compat.push_back(sol.compat);
        res.residual.push_back(sol.residual_inf);
    }
    return res;
}

KCorrectorResult corrector_K(const Model& model, const ZeroMeanSolver& solver, double f0_value,
                             const Eigen::VectorXd& g_slice) {
    const GridDiscretization& grid = model.grid;
    const std::size_t my = grid.y_count();
    const std::size_t mg = grid.g_count();
    const double hw = grid.cell_weight;

    double coupling = 0.0; // \int_G btilde (g - f0)
    for (std::size_t c = 0; c < mg; ++c)
        coupling += model.rates.btilde[c] * (g_slice[c] - f0_value) * hw;

    KCorrectorResult res;
    res.psi.resize(my);
    Point eta{}, xi{};
    for (std::size_t i = 0; i < my; ++i) {
        const std::size_t cy = grid.y_cells[i];
        grid.center(cy, eta);
        double s = 0.0;
        for (std::size_t c = 0; c < mg; ++c) {
            const std::size_t cg = grid.g_cells[c];
            const double a = model.atil_cells(cy, cg);
            if (a == 0.0) continue;
            grid.center(cg, xi);
            s += a * model.contrast(eta, xi) * (g_slice[c] - f0_value);
        }
        res.psi[i] = s * hw - coupling;
    }

    ZeroMeanSolution sol = solver.solve(res.psi);
    res.k.phase = Phase::Y;
    res.k.values = sol.u;
    res.compat = sol.compat;
    res.residual = sol.residual_inf;
    return res;
}

EffectiveModel solve_effective_model(Model model, double theta_tol, double compat_tol) {
    EffectiveModel em;
    em.connectivity = check_connectivity(model.geometry, model.kernel, model.grid);
    if (!em.connectivity.connected)
        throw DisconnectedFastPhase("fast phase is not connected: " + em.connectivity.summary());

    CellOperator op(model);
    ZeroMeanSolver solver(op, compat_tol);
    PhiResult phi = corrector_phi(model, solver);
    ThetaResult theta = effective_matrix_theta(model, phi.phi, theta_tol, true);
    KappaResult kappa = corrector_kappa(model, solver, phi.phi, theta.theta);

    em.model = std::move(model);
    em.theta = theta.theta;
    em.theta_identity = theta.theta_identity;
    em.theta_mismatch = theta.mismatch;
    em.phi = std::move(phi.phi);
    em.kappa = std::move(kappa.kappa);
    em.phi_compat = std::move(phi.compat);
    em.kappa_compat = std::move(kappa.compat);
    em.phi_residual = std::move(phi.residual);
    em.kappa_residual = std::move(kappa.residual);
    return em;
}

} // namespace hcj
