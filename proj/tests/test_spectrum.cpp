#include "fixtures.hpp"

#include "hcjump/rng.hpp"
#include "hcjump/spectrum.hpp"

#include <doctest.h>

#include <cmath>

using namespace hcj;
using namespace hcjtest;

TEST_CASE("sigma1 on box1d: 0.5 simple, 1.0 with full multiplicity") {
    const Model& m = box1d_model();
    const Eigen::VectorXd ev = sigma1_eigen(m);
    const Eigen::Index n = ev.size();
    CHECK(ev[0] == doctest::Approx(0.5).epsilon(1e-6));
    for (Eigen::Index i = 1; i < n; ++i) CHECK(ev[i] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ev.minCoeff() > 0.0);
}

TEST_CASE("sigma1 sits inside the rho-gamma bracket") {
    const Model& m = box1d_model();
    const Eigen::VectorXd ev = sigma1_eigen(m);
    const PerronResult perron = spectral_radius_check(m);
    const double lo = m.rates.gamma1_fold - perron.rho * m.rates.gamma2_fold;
    CHECK(ev.minCoeff() >= lo - 1e-9);
    CHECK(ev.maxCoeff() <= m.rates.gamma2_fold + 1e-9);
}

TEST_CASE("resolvent scalar on box1d has the closed form 1 + 0.5/(0.5 - lambda)") {
    const Model& m = box1d_model();
    const Eigen::MatrixXd S = assemble_phi_minus_K(m);
    CHECK(resolvent_h(m, S, 0.25) == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(resolvent_h(m, S, 0.75) == doctest::Approx(-1.0).epsilon(1e-3));
    // tail limit
    const double far = resolvent_h(m, S, 1e4 * m.rates.gamma2);
    CHECK(far >= 0.999);
    CHECK(far <= 1.001);
    // negative lambda is excluded by the sign of lambda * h
    const double hneg = resolvent_h(m, S, -0.3);
    CHECK(hneg >= 0.0);
    CHECK(-0.3 * hneg < 0.0);
}

TEST_CASE("sigma2 scan brackets lambda1 = 0.5 and lambda2 = 1.0 on box1d") {
    const Model& m = box1d_model();
    const Eigen::VectorXd s1 = sigma1_eigen(m);
    const Sigma2Result res = sigma2_scan(m, s1, 5.0, 400);
    CHECK(std::abs(res.lambda1 - 0.5) <= 1e-3);
    CHECK(std::abs(res.lambda2 - 1.0) <= 1e-3);
    // h >= 0 on the scanned part of [0, lambda1]
    for (const auto& s : res.samples) {
        if (s.flagged) continue;
        if (s.lambda <= res.lambda1 - 1e-6) CHECK(s.h >= 0.0);
        if (s.lambda >= res.lambda2 + 1e-6) CHECK(s.h >= 0.0);
    }
}

TEST_CASE("range of Phi is covered by the spectrum sampling") {
    // box1d: Ran Phi is a point sitting on a sigma1 eigenvalue
    {
        const Model& m = box1d_model();
        const Eigen::VectorXd s1 = sigma1_eigen(m);
        const Sigma2Result scan = sigma2_scan(m, s1, 5.0, 300);
        const double lam = m.rates.phi_mult.minCoeff();
        double dist = 1e300;
        for (Eigen::Index k = 0; k < s1.size(); ++k)
            dist = std::min(dist, std::abs(s1[k] - lam));
        const Eigen::MatrixXd S = assemble_phi_minus_K(m);
        CHECK((dist < scan.guard || resolvent_h(m, S, lam) >= -1e-9));
    }
    // non-constant contrast: the discrete sigma1 points fill Ran Phi
    {
        const Model& m = wcos_model();
        const Eigen::VectorXd s1 = sigma1_eigen(m);
        const double lo = m.rates.phi_mult.minCoeff();
        const double hi = m.rates.phi_mult.maxCoeff();
        for (int i = 0; i <= 50; ++i) {
            const double lam = lo + (hi - lo) * i / 50.0;
            double dist = 1e300;
            for (Eigen::Index k = 0; k < s1.size(); ++k)
                dist = std::min(dist, std::abs(s1[k] - lam));
            CHECK(dist <= 0.02); // refines like the eigenvalue spacing
        }
    }
}

TEST_CASE("Perron pair of Phi^{-1} K on box1d") {
    const Model& m = box1d_model();
    const PerronResult res = spectral_radius_check(m);
    CHECK(res.rho == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(res.rho_eigensolve == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(res.rho - res.rho_eigensolve) <= 1e-10);
    CHECK(res.beta1 > 0.0);
    CHECK(res.beta2 - res.beta1 <= 1e-8); // constant eigenfunction
}

TEST_CASE("Perron eigenfunction stays positive on box2d") {
    const Model& m = box2d_model_small();
    const PerronResult res = spectral_radius_check(m);
    CHECK(res.beta1 > 0.0);
    CHECK(res.rho < 1.0);
}

TEST_CASE("Rayleigh identity and strict domination") {
    const Model& m = wcos_model();
    const Eigen::MatrixXd K = assemble_K_matrix(m);
    const Eigen::VectorXd& phi = m.rates.phi_mult;
    const PerronResult res = spectral_radius_check(m);
    const double hw = m.grid.cell_weight;

    const double lhs = (K * res.g0).dot(res.g0) * hw;
    const double rhs = res.rho * (phi.asDiagonal() * res.g0).dot(res.g0) * hw;
    CHECK(std::abs(lhs - rhs) <= 1e-8);

    RngStream rng(23, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd g(phi.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.uniform(0.1, 2.0);
        const double kg = (K * g).dot(g);
        const double pg = (phi.asDiagonal() * g).dot(g);
        CHECK(kg < pg);
    }
}

TEST_CASE("full spectral report wires the pieces together") {
    const Model& m = box1d_model();
    const SpectralReport rep = spectral_report(m, 5.0, 200);
    CHECK(rep.sigma1.size() == static_cast<Eigen::Index>(m.grid.g_count()));
    CHECK(rep.phi_min == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.phi_max == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.gamma1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.gamma2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.sigma2.conflicts.empty());
    CHECK(0.0 < rep.sigma2.lambda1);
    CHECK(rep.sigma2.lambda1 < rep.gamma1 + 1e-3);
    CHECK(rep.sigma2.lambda2 > rep.gamma2 - 1e-3);
}
