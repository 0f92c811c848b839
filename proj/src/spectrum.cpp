#include "hcjump/spectrum.hpp"

#include "hcjump/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace hcj {

Eigen::MatrixXd assemble_K_matrix(const Model& model) {
    const GridDiscretization& grid = model.grid;
    const std::size_t m = grid.g_count();
    const double hw = grid.cell_weight;
    Eigen::MatrixXd K(m, m);
    Point xi{}, eta{};
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ci = grid.g_cells[i];
        grid.center(ci, xi);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t cj = grid.g_cells[j];
            grid.center(cj, eta);
            K(i, j) = model.atil_cells(ci, cj) * model.contrast(xi, eta) * hw;
        }
    }
    return K;
}

Eigen::MatrixXd assemble_phi_minus_K(const Model& model) {
    Eigen::MatrixXd S = -assemble_K_matrix(model);
    S.diagonal() += model.rates.phi_mult;
    return S;
}

Eigen::VectorXd sigma1_eigen(const Model& model) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_phi_minus_K(model));
    return es.eigenvalues();
}

double resolvent_h(const Model& model, const Eigen::MatrixXd& phi_minus_k, double lambda) {
    const std::size_t m = static_cast<std::size_t>(phi_minus_k.rows());
    Eigen::MatrixXd A = phi_minus_k;
    A.diagonal().array() -= lambda;
    // indefinite once lambda enters the spectrum: partial-pivot LU, not LDLT
    const Eigen::VectorXd u = A.partialPivLu().solve(Eigen::VectorXd::Ones(m));
    return 1.0 + model.rates.btilde.dot(u) * model.grid.cell_weight;
}

namespace {

double min_sigma1_distance(const Eigen::VectorXd& sigma1, double lambda) {
    double d = 1e300;
    for (Eigen::Index i = 0; i < sigma1.size(); ++i)
        d = std::min(d, std::abs(sigma1[i] - lambda));
    return d;
}

// bisect the sign change of h between lo (h >= 0) and hi (h < 0) or the
// reverse; returns the midpoint of the final bracket
double bisect_sign_change(const Model& model, const Eigen::MatrixXd& S, double lo, double hi,
                          bool lo_nonneg, double width) {
    for (int iter = 0; iter < 200 && hi - lo > width; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double h = resolvent_h(model, S, mid);
        if ((h >= 0.0) == lo_nonneg)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

Sigma2Result sigma2_scan(const Model& model, const Eigen::VectorXd& sigma1, double lambda_max,
                         int samples) {
    const Eigen::MatrixXd S = assemble_phi_minus_K(model);
    const double gamma2 = std::max(model.rates.gamma2, 1e-12);
    Sigma2Result out;
    out.guard = 1e-3 * gamma2;

    out.samples.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        Sigma2Sample s;
        s.lambda = lambda_max * static_cast<double>(i) / static_cast<double>(samples - 1);
        if (min_sigma1_distance(sigma1, s.lambda) < out.guard) {
            s.flagged = true; // resolvent ill-conditioned near sigma1
        } else {
            s.h = resolvent_h(model, S, s.lambda);
        }
        out.samples.push_back(s);
    }

    const double refine = 1e-4 * std::max(1.0, gamma2);

    // lambda1: largest lambda* with h >= 0 on [0, lambda*]
    double lo = 0.0;
    bool found_neg = false;
    for (const auto& s : out.samples) {
        if (s.flagged) continue;
        if (s.h >= 0.0 && !found_neg)
            lo = s.lambda;
        else if (s.h < 0.0) {
            out.lambda1 = bisect_sign_change(model, S, lo, s.lambda, true, refine);
            found_neg = true;
            break;
        }
    }
    if (!found_neg) out.lambda1 = lambda_max;

    // lambda2: smallest lambda past the last sign change with h >= 0 onward
    double last_neg = -1.0, next_pos = -1.0;
    for (const auto& s : out.samples) {
        if (s.flagged) continue;
        if (s.h < 0.0) {
            last_neg = s.lambda;
            next_pos = -1.0;
        } else if (last_neg >= 0.0 && next_pos < 0.0) {
            next_pos = s.lambda;
        }
    }
    if (last_neg >= 0.0 && next_pos > 0.0)
        out.lambda2 = bisect_sign_change(model, S, last_neg, next_pos, false, refine);
    else if (last_neg < 0.0)
        out.lambda2 = sigma1.size() ? sigma1.maxCoeff() : 0.0;
    else
        out.lambda2 = lambda_max; // condition never recovers inside the scan window

    // sigma1 points where the scalar condition fails on both sides
    for (Eigen::Index k = 0; k < sigma1.size(); ++k) {
        const double mu = sigma1[k];
        const double dl = mu - 2.0 * out.guard, dr = mu + 2.0 * out.guard;
        if (dl <= 0.0) continue;
        if (min_sigma1_distance(sigma1, dl) < out.guard ||
            min_sigma1_distance(sigma1, dr) < out.guard)
            continue;
        if (resolvent_h(model, S, dl) < 0.0 && resolvent_h(model, S, dr) < 0.0)
            out.conflicts.push_back(mu);
    }
    return out;
}

PerronResult spectral_radius_check(const Model& model) {
    const Eigen::MatrixXd K = assemble_K_matrix(model);
    const Eigen::VectorXd& phi = model.rates.phi_mult;
    const std::size_t m = static_cast<std::size_t>(K.rows());

    PerronResult res;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    double rho_prev = 0.0;
    for (int iter = 0; iter < 50000; ++iter) {
        Eigen::VectorXd w = (K * v).cwiseQuotient(phi);
        const double norm = w.lpNorm<Eigen::Infinity>();
        if (!(norm > 0.0)) throw PerronFailure("power iteration collapsed to zero");
        w /= norm;
        if (w.minCoeff() <= 0.0)
            throw PerronFailure("power iterate lost positivity; rate fields are broken");
        const double rho = (K * w).dot(w) / (phi.asDiagonal() * w).dot(w);
        v = w;
        res.iterations = iter + 1;
        if (std::abs(rho - rho_prev) < 1e-14) {
            rho_prev = rho;
            break;
        }
        rho_prev = rho;
    }
    res.rho = rho_prev;
    res.g0 = v / v.maxCoeff();

    // symmetric confirmation: Phi^{-1/2} K Phi^{-1/2} has the same spectrum
    const Eigen::VectorXd isq = phi.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd sym = isq.asDiagonal() * K * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    res.rho_eigensolve = es.eigenvalues().maxCoeff();
    Eigen::VectorXd q = es.eigenvectors().col(m - 1);
    if (q.sum() < 0.0) q = -q;
    Eigen::VectorXd g0 = isq.asDiagonal() * q;
    if (g0.minCoeff() <= 0.0)
        throw PerronFailure("Perron eigenfunction is not strictly positive");
    res.g0 = g0 / g0.maxCoeff();
    res.beta1 = res.g0.minCoeff();
    res.beta2 = res.g0.maxCoeff();
    if (!(res.rho_eigensolve < 1.0))
        throw PerronFailure("spectral radius of Phi^{-1} K is not below one");
    return res;
}

SpectralReport spectral_report(const Model& model, double lambda_max, int samples) {
    SpectralReport rep;
    rep.sigma1 = sigma1_eigen(model);
    rep.sigma2 = sigma2_scan(model, rep.sigma1, lambda_max, samples);
    rep.perron = spectral_radius_check(model);
    rep.phi_min = model.rates.phi_mult.minCoeff();
    rep.phi_max = model.rates.phi_mult.maxCoeff();
    rep.gamma1 = model.rates.gamma1;
    rep.gamma2 = model.rates.gamma2;
    rep.gamma1_fold = model.rates.gamma1_fold;
    rep.gamma2_fold = model.rates.gamma2_fold;
    return rep;
}

} // namespace hcj
