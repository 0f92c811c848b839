#include "hcjump/eps_process.hpp"

#include "hcjump/errors.hpp"

#include <algorithm>

namespace hcj {

double total_jump_rate(const Model& m, const Point& x, double eps) {
    Point xi{};
    const bool src_fast = eps_point_fast(m, x, eps, &xi);
    const double inv_eps2 = 1.0 / (eps * eps);
    double rate = 0.0;
    for_each_eps_target(m, xi,
                        [&](std::size_t, bool tgt_fast, const Point&, const Point& etaw,
                            double mass) {
                            if (src_fast && tgt_fast)
                                rate += mass * inv_eps2;
                            else
                                rate += mass * m.contrast(xi, etaw);
                        });
    return rate;
}

std::pair<double, Point> sample_next_jump(const Model& m, const Point& x, double eps,
                                          RngStream& rng) {
    const double l1 = m.kernel.l1_norm();
    const double alpha2 = m.contrast.alpha2();
    const double big = std::max(1.0, eps * eps * alpha2); // dominating Lambda value
    const double lambda_bar = l1 * big / (eps * eps);

    Point cur = x, xi_src{}, z{}, y{}, xi_tgt{};
    const bool src_fast = eps_point_fast(m, cur, eps, &xi_src);
    double waited = 0.0;
    for (std::uint64_t guard = 0; guard < 1000000000ULL; ++guard) {
        waited += rng.exponential(lambda_bar);
        m.kernel.sample(rng, z);
        for (int k = 0; k < m.grid.dim; ++k) y[k] = cur[k] + eps * z[k];
        const bool tgt_fast = eps_point_fast(m, y, eps, &xi_tgt);
        double lam;
        if (src_fast && tgt_fast)
            lam = 1.0;
        else
            lam = eps * eps * m.contrast(xi_src, xi_tgt);
        if (rng.uniform() * big < lam) return {waited, y};
    }
    throw StepBudgetExceeded("thinning proposal budget exhausted");
}

EpsTrajectory simulate_eps_path(const Model& m, const EpsConfig& cfg, RngStream& rng,
                                std::span<const double> sample_times) {
    EpsTrajectory traj;
    Point x = cfg.x0;
    double t = 0.0;
    std::size_t next_sample = 0;
    traj.entries.push_back({0.0, x, eps_point_fast(m, x, cfg.epsilon), false});

    while (t < cfg.horizon) {
        auto [wait, y] = sample_next_jump(m, x, cfg.epsilon, rng);
        const double t_new = t + wait;
        while (next_sample < sample_times.size() &&
               sample_times[next_sample] <= std::min(t_new, cfg.horizon)) {
            traj.entries.push_back(
                {sample_times[next_sample], x, eps_point_fast(m, x, cfg.epsilon), true});
            ++next_sample;
        }
        if (t_new >= cfg.horizon) break;
        t = t_new;
        x = y;
        traj.entries.push_back({t, x, eps_point_fast(m, x, cfg.epsilon), false});
        if (++traj.jump_count > cfg.max_events)
            throw StepBudgetExceeded("event budget exceeded in eps-path simulation");
    }
    traj.entries.push_back({cfg.horizon, x, eps_point_fast(m, x, cfg.epsilon), false});
    return traj;
}

EpsTrajectory::Entry eps_state_at(const EpsTrajectory& traj, double t) {
    EpsTrajectory::Entry out = traj.entries.front();
    for (const auto& e : traj.entries) {
        if (e.t <= t) out = e;
        if (e.t > t) break;
    }
    out.t = t;
    return out;
}

double apply_eps_generator(const Model& m, const EpsFunctionPair& f, const Point& x, double eps) {
    return apply_eps_generator_fn(m, x, eps, f.fast, f.slow);
}

} // namespace hcj
