#include "fixtures.hpp"

#include "hcjump/cell_solver.hpp"
#include "hcjump/errors.hpp"
#include "hcjump/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace hcj;
using namespace hcjtest;

TEST_CASE("operator annihilates constants and carries the right diagonal") {
    const Model& m = box1d_model();
    const CellOperator op(m);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.size());
    CHECK(op.apply(ones).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((op.alpha().array() - 0.5).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("operator matrix is symmetric") {
    const Model& m = box2d_model_small();
    const CellOperator op(m);
    CHECK((op.dense() - op.dense().transpose()).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("quadratic form identity") {
    const Model& m = box1d_model();
    const CellOperator op(m);
    RngStream rng(3, 0);
    Eigen::VectorXd u(op.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.uniform(-1.0, 1.0);

    const double lhs = u.dot(op.apply(u));
    const double hw = m.grid.cell_weight;
    double rhs = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i)
        for (std::size_t j = 0; j < op.size(); ++j) {
            const double a = m.atil_cells(m.grid.y_cells[i], m.grid.y_cells[j]);
            const double d = u[static_cast<Eigen::Index>(j)] - u[static_cast<Eigen::Index>(i)];
            rhs += a * d * d * hw * hw;
        }
    CHECK(std::abs(lhs - (-0.5) * rhs / hw) <= 1e-10);
}

TEST_CASE("zero-mean solve basics") {
    const Model& m = box1d_model();
    const CellOperator op(m);
    const ZeroMeanSolver solver(op);

    // rhs = 0 -> u = 0
    ZeroMeanSolution sol = solver.solve(Eigen::VectorXd::Zero(op.size()));
    CHECK(sol.u.lpNorm<Eigen::Infinity>() <= 1e-12);

    // nonzero-mean rhs violates solvability
    CHECK_THROWS_AS(solver.solve(Eigen::VectorXd::Ones(op.size())), CompatibilityViolated);
}

TEST_CASE("solver is reproducible and gauge is fixed by the zero mean") {
    const Model& m = box1d_model();
    const CellOperator op(m);
    const ZeroMeanSolver solver(op);
    RngStream rng(5, 1);
    Eigen::VectorXd rhs(op.size());
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs[i] = rng.uniform(-1.0, 1.0);
    rhs.array() -= rhs.mean(); // solvable

    const ZeroMeanSolution a = solver.solve(rhs);
    const ZeroMeanSolution b = solver.solve(rhs);
    CHECK((a.u - b.u).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(std::abs(a.u.mean()) <= 1e-12);
    // shifting any solution back to zero mean reproduces it
    Eigen::VectorXd shifted = a.u.array() + 3.25;
    shifted.array() -= shifted.mean();
    CHECK((shifted - a.u).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("corrector phi on box1d is xi - 1/4") {
    const EffectiveModel& em = box1d_effective();
    const GridDiscretization& grid = em.model.grid;
    double sup = 0.0;
    Point xi{};
    for (std::size_t i = 0; i < grid.y_count(); ++i) {
        grid.center(grid.y_cells[i], xi);
        sup = std::max(sup, std::abs(em.phi.values(static_cast<Eigen::Index>(i), 0) -
                                     (xi[0] - 0.25)));
    }
    CHECK(sup <= 2e-3);
    CHECK(std::abs(em.phi_compat[0]) <= 1e-10);
    CHECK(std::abs(em.phi.values.col(0).mean()) <= 1e-12);
}

TEST_CASE("effective matrix on box1d: both routes give 1/12") {
    // 1/12 is pinned three independent ways: the solvability constant of the
    // second corrector equation, the variational form evaluated at the
    // corrector (the no-corrector bound 3/32 already excludes anything
    // larger), and the Monte Carlo variance of the microscale process
    const EffectiveModel& em = box1d_effective();
    CHECK(std::abs(em.theta(0, 0) - 1.0 / 12.0) <= 1e-3);
    CHECK(std::abs(em.theta_identity(0, 0) - 1.0 / 12.0) <= 1e-3);
    CHECK(em.theta_mismatch <= 1e-3);

    // outer-copies arrangement of the defining integral agrees
    const Eigen::MatrixXd alt = theta_outer_copies_arrangement(em.model, em.phi);
    CHECK(std::abs(alt(0, 0) - em.theta(0, 0)) <= 1e-10);
}

TEST_CASE("box2d: effective matrix is isotropic and phi has mirror symmetry") {
    const Model& m = box2d_model_small();
    const EffectiveModel& em = box2d_effective_small();
    CHECK(std::abs(em.theta(0, 1)) <= 1e-6);
    CHECK(std::abs(em.theta(1, 0)) <= 1e-6);
    CHECK(em.theta(0, 0) == doctest::Approx(em.theta(1, 1)).epsilon(1e-8));
    CHECK(em.theta(0, 0) > 0.0);

    // phi_1 is odd under the mirror xi_1 -> 1 - xi_1
    const GridDiscretization& grid = m.grid;
    double worst = 0.0;
    Point xi{};
    for (std::size_t i = 0; i < grid.y_count(); ++i) {
        grid.center(grid.y_cells[i], xi);
        const Point mirrored = make_point(1.0 - xi[0], xi[1]);
        const std::size_t cm = grid.cell_of(torus_wrap(mirrored, 2));
        REQUIRE(grid.is_g[cm] == 0);
        const auto j = static_cast<Eigen::Index>(grid.compact[cm]);
        worst = std::max(worst, std::abs(em.phi.values(static_cast<Eigen::Index>(i), 0) +
                                         em.phi.values(j, 0)));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("disconnected fast phase: the effective matrix collapses") {
    const Model m = disconnected_config().build_model();
    CHECK_THROWS_AS(solve_effective_model(m), DisconnectedFastPhase);

    // bypass the gate to inspect the failure signature: the trapped corrector
    // cancels all motion, both theta routes vanish and positive definiteness
    // is lost against the free-motion scale
    const CellOperator op(m);
    const ZeroMeanSolver solver(op);
    const PhiResult phi = corrector_phi(m, solver);
    const ThetaResult theta = effective_matrix_theta(m, phi.phi, 1e-3, false);
    CHECK(std::abs(theta.theta(0, 0)) <= 1e-4);
    CHECK(std::abs(theta.theta_identity(0, 0)) <= 1e-4);
    CHECK(theta.theta_bare(0, 0) > 1e-3); // free motion would diffuse
    CHECK(theta.min_eigenvalue <= 1e-6 * theta.theta_bare(0, 0));
    CHECK_THROWS_AS(effective_matrix_theta(m, phi.phi, 1e-3, true), ThetaMismatch);

    // the trapped corrector is the closed-form mirror of the free one
    const GridDiscretization& grid = m.grid;
    Point xi{};
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.y_count(); ++i) {
        grid.center(grid.y_cells[i], xi);
        sup = std::max(sup, std::abs(phi.phi.values(static_cast<Eigen::Index>(i), 0) -
                                     (0.25 - xi[0])));
    }
    CHECK(sup <= 2e-3);
}

TEST_CASE("corrector kappa: compatibility is enforced by the effective matrix") {
    const EffectiveModel& em = box1d_effective();
    for (double c : em.kappa_compat) CHECK(std::abs(c) <= 1e-8);
    for (double r : em.kappa_residual) CHECK(r <= 1e-8);
    CHECK(std::abs(em.kappa.values.col(0).mean()) <= 1e-12);
}

TEST_CASE("corrector kappa is stable under refinement") {
    const EffectiveModel& coarse = box1d_effective();
    const EffectiveModel fine = solve_effective_model(box1d_config(1024).build_model());
    double sup = 0.0;
    Point xi{};
    const GridDiscretization& grid = coarse.model.grid;
    for (std::size_t i = 0; i < grid.y_count(); ++i) {
        grid.center(grid.y_cells[i], xi);
        const double vf = eval_field(fine.model.grid, Phase::Y, fine.kappa.values.col(0), xi);
        sup = std::max(sup,
                       std::abs(coarse.kappa.values(static_cast<Eigen::Index>(i), 0) - vf));
    }
    CHECK(sup <= 5e-3);
    // phi sup norm is stable as well
    const double n512 = coarse.phi.values.col(0).lpNorm<Eigen::Infinity>();
    const double n1024 = fine.phi.values.col(0).lpNorm<Eigen::Infinity>();
    CHECK(std::abs(n512 - n1024) <= 5e-3);
}

TEST_CASE("K corrector: matched slices give the zero corrector") {
    const Model& m = box1d_model();
    const CellOperator op(m);
    const ZeroMeanSolver solver(op);
    const std::size_t mg = m.grid.g_count();

    // g identical to f0 across phases
    const KCorrectorResult same =
        corrector_K(m, solver, 2.5, Eigen::VectorXd::Constant(mg, 2.5));
    CHECK(same.psi.lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(same.k.values.lpNorm<Eigen::Infinity>() <= 1e-10);

    // f0 = 1, g = 0: on box1d the two coupling terms cancel pointwise
    const KCorrectorResult unit = corrector_K(m, solver, 1.0, Eigen::VectorXd::Zero(mg));
    CHECK(std::abs(unit.compat) <= 1e-10);
    CHECK(unit.k.values.lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("K corrector: solvability and the p-floor bound") {
    const Model& m = box1d_model();
    const CellOperator op(m);
    const ZeroMeanSolver solver(op);
    Eigen::VectorXd slice(m.grid.g_count());
    Point xi{};
    for (std::size_t i = 0; i < m.grid.g_count(); ++i) {
        m.grid.center(m.grid.g_cells[i], xi);
        slice[static_cast<Eigen::Index>(i)] = xi[0];
    }
    const KCorrectorResult res = corrector_K(m, solver, 0.0, slice);
    CHECK(std::abs(res.compat) <= 1e-10);
    const double c0 = m.rates.p_y.minCoeff();
    CHECK(res.k.values.lpNorm<Eigen::Infinity>() <=
          res.psi.lpNorm<Eigen::Infinity>() / c0 + 1e-12);

    // a non-constant contrast produces a genuinely nonzero corrector
    const Model& mw = wcos_model();
    const CellOperator opw(mw);
    const ZeroMeanSolver solverw(opw);
    Eigen::VectorXd slicew(mw.grid.g_count());
    for (std::size_t i = 0; i < mw.grid.g_count(); ++i) {
        mw.grid.center(mw.grid.g_cells[i], xi);
        slicew[static_cast<Eigen::Index>(i)] = std::cos(2.0 * M_PI * xi[0]);
    }
    const KCorrectorResult resw = corrector_K(mw, solverw, 0.3, slicew);
    CHECK(std::abs(resw.compat) <= 1e-10);
    CHECK(resw.k.values.lpNorm<Eigen::Infinity>() > 1e-4);
    CHECK(resw.k.values.lpNorm<Eigen::Infinity>() <=
          resw.psi.lpNorm<Eigen::Infinity>() / mw.rates.p_y.minCoeff() + 1e-12);
}

TEST_CASE("matrix-free path reproduces the dense solve") {
    const Model& m = box1d_model();
    const CellOperator dense_op(m);
    const CellOperator fft_op(m, /*dense_limit=*/16);
    CHECK_FALSE(fft_op.has_dense());

    RngStream rng(17, 4);
    Eigen::VectorXd u(dense_op.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.uniform(-1.0, 1.0);
    CHECK((dense_op.apply(u) - fft_op.apply(u)).lpNorm<Eigen::Infinity>() <= 1e-11);

    const ZeroMeanSolver sd(dense_op);
    const ZeroMeanSolver sf(fft_op);
    Eigen::VectorXd rhs = u;
    rhs.array() -= rhs.mean();
    const ZeroMeanSolution a = sd.solve(rhs);
    const ZeroMeanSolution b = sf.solve(rhs);
    CHECK((a.u - b.u).lpNorm<Eigen::Infinity>() <= 1e-9);
}
