#pragma once

#include "hcjump/model.hpp"
#include "hcjump/rng.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace hcj {

struct EpsConfig {
    double epsilon = 0.1;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    Point x0{};
    std::uint64_t max_events = 1000000000ULL;
};

// phase of a spatial point: the grid cell of {x/eps} decides, so the
// simulators and the generator quadrature share one classification
inline bool eps_point_fast(const Model& m, const Point& x, double eps, Point* xi_out = nullptr) {
    Point xi{};
    for (int k = 0; k < m.grid.dim; ++k) {
        const double s = x[k] / eps;
        xi[k] = s - std::floor(s);
        if (xi[k] >= 1.0) xi[k] = 0.0;
    }
    if (xi_out) *xi_out = xi;
    return m.grid.is_g[m.grid.cell_of(xi)] == 0;
}

// Quadrature core shared by the rate evaluation and the generator: visits
// every unwrapped grid cell intersecting the kernel support around xi.
// fn(wrapped_cell, target_fast, eta_unwrapped_center, eta_wrapped_center, mass)
template <typename Fn>
void for_each_eps_target(const Model& m, const Point& xi, Fn&& fn) {
    const GridDiscretization& grid = m.grid;
    const int n = grid.n;
    const double h = grid.h;
    const double R = m.kernel.support_radius_inf();

    int lo[kMaxDim], hi[kMaxDim];
    for (int k = 0; k < grid.dim; ++k) {
        lo[k] = static_cast<int>(std::floor((xi[k] - R) / h)) - 1;
        hi[k] = static_cast<int>(std::ceil((xi[k] + R) / h)) + 1;
    }
    int tc[kMaxDim], wrapped[kMaxDim];
    Point eta{}, etaw{}, ulo{}, uhi{};
    auto walk = [&](auto&& self, int axis) -> void {
        if (axis == grid.dim) {
            for (int k = 0; k < grid.dim; ++k) {
                eta[k] = (tc[k] + 0.5) * h;
                ulo[k] = xi[k] - (tc[k] + 1.0) * h;
                uhi[k] = xi[k] - tc[k] * h;
                int w = tc[k] % n;
                if (w < 0) w += n;
                wrapped[k] = w;
                etaw[k] = (w + 0.5) * h;
            }
            const double mass = m.kernel.box_mass(ulo, uhi);
            if (mass == 0.0) return;
            const std::size_t cell = grid.encode(wrapped);
            fn(cell, grid.is_g[cell] == 0, eta, etaw, mass);
            return;
        }
        for (tc[axis] = lo[axis]; tc[axis] <= hi[axis]; ++tc[axis]) self(self, axis + 1);
    };
    walk(walk, 0);
}

// lambda_eps(x): total jump intensity of the rescaled process at x
double total_jump_rate(const Model& m, const Point& x, double eps);

// one thinning step: waiting time to the next accepted jump and the landing
// point; exact in distribution for the state-dependent rate
std::pair<double, Point> sample_next_jump(const Model& m, const Point& x, double eps,
                                          RngStream& rng);

struct EpsTrajectory {
    struct Entry {
        double t;
        Point x;
        bool fast;
        bool is_sample; // recorded at a requested time rather than a jump
    };
    std::vector<Entry> entries; // first entry is the initial state, last the horizon state
    std::uint64_t jump_count = 0;
};

EpsTrajectory simulate_eps_path(const Model& m, const EpsConfig& cfg, RngStream& rng,
                                std::span<const double> sample_times = {});

// state of the path at time t (piecewise constant between jumps)
EpsTrajectory::Entry eps_state_at(const EpsTrajectory& traj, double t);

// (hat L_eps f)(x) for a two-branch function: fast branch F1(x), slow
// branch F2(x, eta) with eta the cell coordinate
template <typename FastFn, typename SlowFn>
double apply_eps_generator_fn(const Model& m, const Point& x, double eps, FastFn&& fast_fn,
                              SlowFn&& slow_fn) {
    Point xi{};
    const bool src_fast = eps_point_fast(m, x, eps, &xi);
    const double fx = src_fast ? fast_fn(x) : slow_fn(x, xi);
    const double inv_eps2 = 1.0 / (eps * eps);

    double acc = 0.0;
    for_each_eps_target(m, xi,
                        [&](std::size_t cell, bool tgt_fast, const Point& eta, const Point& etaw,
                            double mass) {
                            (void)cell;
                            Point y{};
                            for (int k = 0; k < m.grid.dim; ++k)
                                y[k] = x[k] + eps * (eta[k] - xi[k]);
                            const double fy = tgt_fast ? fast_fn(y) : slow_fn(y, etaw);
                            if (src_fast && tgt_fast)
                                acc += mass * inv_eps2 * (fy - fx);
                            else
                                acc += mass * m.contrast(xi, etaw) * (fy - fx);
                        });
    return acc;
}

struct EpsFunctionPair {
    std::function<double(const Point&)> fast;
    std::function<double(const Point&, const Point&)> slow;
};
double apply_eps_generator(const Model& m, const EpsFunctionPair& f, const Point& x, double eps);

} // namespace hcj
