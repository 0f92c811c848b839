#include "hcjump/cell_solver.hpp"
#include "hcjump/config.hpp"
#include "hcjump/convergence.hpp"
#include "hcjump/errors.hpp"
#include "hcjump/io.hpp"
#include "hcjump/limit_process.hpp"
#include "hcjump/parallel.hpp"
#include "hcjump/semigroup.hpp"
#include "hcjump/spectrum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iostream>

namespace {

constexpr const char* kVersion = "0.1.0";

std::string now_iso() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<double> parse_sorted_list(const std::string& csv) {
    std::vector<double> out = parse_list(csv);
    std::sort(out.begin(), out.end());
    return out;
}

hcj::RunManifest make_manifest(const std::string& subcommand, const std::string& config_text,
                               std::uint64_t seed) {
    hcj::RunManifest man;
    man.tool_version = kVersion;
    man.subcommand = subcommand;
    man.config_hash = hcj::fnv1a_hex(config_text);
    man.seed = seed;
    man.started_at = now_iso();
    return man;
}

void finish_manifest(hcj::RunManifest& man, const std::string& primary_out) {
    man.finished_at = now_iso();
    const std::string path = primary_out + ".manifest.json";
    man.outputs.push_back(path);
    hcj::write_manifest(man, path);
}

// the default smooth test pair used by the converge subcommand
hcj::TestFunctionPair default_pair(const hcj::Model& m) {
    hcj::TestFunctionPair p;
    const int d = m.grid.dim;
    p.f0 = hcj::XProfile::gaussian(d, 1.0, hcj::make_point(0.3, -0.1, 0.2), 0.8,
                                   hcj::make_point(0.7, 0.3, 0.0), 0.4);
    p.gx = hcj::XProfile::gaussian(d, 0.8, hcj::make_point(-0.2, 0.15, 0.0), 1.0);
    p.g_xi.resize(m.grid.g_count());
    hcj::Point xi{};
    for (std::size_t i = 0; i < m.grid.g_count(); ++i) {
        m.grid.center(m.grid.g_cells[i], xi);
        p.g_xi[static_cast<Eigen::Index>(i)] = 0.5 + 0.3 * std::cos(2.0 * M_PI * xi[0]);
    }
    return p;
}

struct CommonArgs {
    std::string config_path;
    std::string cell_path;
    std::string out_path;
    bool json_diagnostics = false;
    unsigned threads = hcj::default_thread_count();
};

int run_validate(const CommonArgs& args) {
    const std::string text = hcj::read_text_file(args.config_path);
    const hcj::Config cfg = hcj::Config::from_string(text, args.config_path);
    const hcj::CellGeometry geom = cfg.geometry();
    const hcj::Kernel kern = cfg.kernel();
    const hcj::ContrastField w = cfg.contrast();
    const hcj::GridDiscretization grid = hcj::GridDiscretization::build(geom, cfg.n);
    const hcj::ValidationReport rep = hcj::validate_inputs(geom, kern, w, &grid);

    nlohmann::json jrep = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        std::cout << (c.passed ? "[pass] " : "[FAIL] ") << c.name << "  measured "
                  << hcj::format_double(c.measured) << "  (" << c.detail << ")\n";
        jrep.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"measured", c.measured},
                        {"detail", c.detail}});
    }
    bool connected = false;
    if (rep.all_passed()) {
        const hcj::ConnectivityReport conn = hcj::check_connectivity(geom, kern, grid);
        connected = conn.connected;
        std::cout << (connected ? "[pass] " : "[FAIL] ") << "fast_phase_connectivity  "
                  << conn.summary() << "\n";
        jrep.push_back({{"name", "fast_phase_connectivity"},
                        {"passed", connected},
                        {"measured", static_cast<double>(conn.winding_rank)},
                        {"detail", conn.summary()}});
    }
    if (!args.out_path.empty()) {
        nlohmann::json doc;
        doc["checks"] = jrep;
        hcj::write_text_file(args.out_path, doc.dump(2) + "\n");
        hcj::RunManifest man = make_manifest("validate", text, cfg.seed);
        man.outputs.push_back(args.out_path);
        finish_manifest(man, args.out_path);
    }
    if (!rep.all_passed()) hcj::ensure_valid(rep);
    if (!connected) throw hcj::DisconnectedFastPhase("fast phase connectivity check failed");
    return 0;
}

int run_solve_cell(const CommonArgs& args, const std::string& csv_path) {
    const std::string text = hcj::read_text_file(args.config_path);
    const hcj::Config cfg = hcj::Config::from_string(text, args.config_path);
    const hcj::EffectiveModel em =
        hcj::solve_effective_model(cfg.build_model(), cfg.theta_tol, cfg.compat_tol);

    hcj::RunManifest man = make_manifest("solve-cell", text, cfg.seed);
    hcj::write_cell_json(args.out_path, cfg, em);
    man.outputs.push_back(args.out_path);
    const std::string csv = csv_path.empty() ? args.out_path + ".correctors.csv" : csv_path;
    hcj::write_corrector_csv(csv, em);
    man.outputs.push_back(csv);
    finish_manifest(man, args.out_path);

    std::cout << "theta (defining route):\n" << em.theta << "\n";
    std::cout << "theta (quadratic identity):\n" << em.theta_identity << "\n";
    std::cout << "route mismatch: " << hcj::format_double(em.theta_mismatch) << "\n";
    return 0;
}

int run_simulate_eps(const CommonArgs& args, double eps, std::size_t paths, double horizon,
                     std::uint64_t seed, const std::string& times_csv,
                     const std::string& summary_path) {
    const std::string text = hcj::read_text_file(args.config_path);
    const hcj::Config cfg = hcj::Config::from_string(text, args.config_path);
    const hcj::Model model = cfg.build_model();

    hcj::EpsConfig ecfg;
    ecfg.epsilon = eps;
    ecfg.horizon = horizon;
    ecfg.seed = seed;
    ecfg.x0 = cfg.x0;
    const std::vector<double> times =
        times_csv.empty() ? std::vector<double>{} : parse_sorted_list(times_csv);

    std::vector<hcj::EpsTrajectory> trajs(paths);
    hcj::parallel_for(paths, args.threads, [&](std::size_t p) {
        hcj::RngStream rng(seed, p);
        trajs[p] = hcj::simulate_eps_path(model, ecfg, rng, times);
    });

    hcj::RunManifest man = make_manifest("simulate-eps", text, seed);
    hcj::write_eps_paths_csv(args.out_path, trajs, model.grid.dim, eps);
    man.outputs.push_back(args.out_path);

    // occupation fraction and terminal-marginal moments, fixed order
    double fast_time = 0.0, total_time = 0.0, mean = 0.0, second = 0.0;
    std::uint64_t events = 0;
    for (const auto& tr : trajs) {
        for (std::size_t i = 0; i + 1 < tr.entries.size(); ++i) {
            const double dt = tr.entries[i + 1].t - tr.entries[i].t;
            total_time += dt;
            if (tr.entries[i].fast) fast_time += dt;
        }
        const double xT = tr.entries.back().x[0];
        mean += xT;
        second += xT * xT;
        events += tr.jump_count;
    }
    mean /= static_cast<double>(paths);
    second /= static_cast<double>(paths);
    nlohmann::json summary;
    summary["paths"] = paths;
    summary["epsilon"] = eps;
    summary["horizon"] = horizon;
    summary["occupation_fast"] = total_time > 0 ? fast_time / total_time : 0.0;
    summary["terminal_mean_x0"] = mean;
    summary["terminal_var_x0"] = second - mean * mean;
    summary["total_jumps"] = events;
    const std::string spath = summary_path.empty() ? args.out_path + ".summary.json"
                                                   : summary_path;
    hcj::write_text_file(spath, summary.dump(2) + "\n");
    man.outputs.push_back(spath);
    finish_manifest(man, args.out_path);
    return 0;
}

int run_simulate_limit(const CommonArgs& args, std::size_t paths, double horizon,
                       std::uint64_t seed, const std::string& times_csv,
                       const std::string& summary_path) {
    const std::string text = hcj::read_text_file(args.cell_path);
    const hcj::CellArchive arc = hcj::read_cell_json(args.cell_path);
    const hcj::Model model = arc.config.build_model();
    const hcj::KChainRates chain = hcj::k_chain_rates(model);
    const std::vector<double> times =
        times_csv.empty() ? std::vector<double>{} : parse_sorted_list(times_csv);

    std::vector<hcj::LimitPath> trajs(paths);
    hcj::parallel_for(paths, args.threads, [&](std::size_t p) {
        hcj::RngStream rng(seed, p);
        trajs[p] =
            hcj::simulate_limit_path(model, chain, arc.theta, arc.config.x0, horizon, rng, times);
    });

    hcj::RunManifest man = make_manifest("simulate-limit", text, seed);
    hcj::write_limit_paths_csv(args.out_path, trajs, model);
    man.outputs.push_back(args.out_path);

    double star_time = 0.0, total_time = 0.0, mean = 0.0, second = 0.0;
    for (const auto& tr : trajs) {
        for (std::size_t i = 0; i + 1 < tr.events.size(); ++i) {
            const double dt = tr.events[i + 1].t - tr.events[i].t;
            total_time += dt;
            if (tr.events[i].k < 0) star_time += dt;
        }
        const double xT = tr.events.back().x[0];
        mean += xT;
        second += xT * xT;
    }
    mean /= static_cast<double>(paths);
    second /= static_cast<double>(paths);
    nlohmann::json summary;
    summary["paths"] = paths;
    summary["horizon"] = horizon;
    summary["occupation_star"] = total_time > 0 ? star_time / total_time : 0.0;
    summary["terminal_mean_x0"] = mean;
    summary["terminal_var_x0"] = second - mean * mean;
    const std::string spath = summary_path.empty() ? args.out_path + ".summary.json"
                                                   : summary_path;
    hcj::write_text_file(spath, summary.dump(2) + "\n");
    man.outputs.push_back(spath);
    finish_manifest(man, args.out_path);
    return 0;
}

int run_memory(const CommonArgs& args, const std::string& modes_csv, double horizon, double dt) {
    const std::string text = hcj::read_text_file(args.cell_path);
    const hcj::CellArchive arc = hcj::read_cell_json(args.cell_path);
    const hcj::Model model = arc.config.build_model();
    const hcj::GOperator op = hcj::assemble_A_G(model);
    const std::vector<double> modes = parse_list(modes_csv);

    // start from the stationary-slice initial datum scaled per mode
    const std::size_t mg = model.grid.g_count();
    const Eigen::VectorXd pi1 = Eigen::VectorXd::Zero(mg);

    std::vector<hcj::CoupledTrace> coupled;
    std::vector<hcj::MemoryTrace> memory;
    for (double kf : modes) {
        coupled.push_back(hcj::evolve_coupled(model, op, arc.theta, hcj::make_point(kf), 1.0,
                                              pi1, horizon, dt));
        memory.push_back(hcj::evolve_memory(model, op, arc.theta, hcj::make_point(kf), 1.0, pi1,
                                            horizon, dt));
    }
    const std::size_t steps = coupled.front().times.size();
    std::vector<double> ktimes(coupled.front().times.begin(), coupled.front().times.end());
    const hcj::MemoryKernelTable ktab = hcj::memory_kernel(model, op, ktimes);

    std::ostringstream out;
    out << "t,K";
    for (double kf : modes) {
        out << ",f0_coupled_k" << hcj::format_double(kf) << ",f0_memory_k"
            << hcj::format_double(kf);
    }
    out << '\n';
    double worst = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        out << hcj::format_double(ktimes[s]) << ','
            << hcj::format_double(ktab.values[static_cast<Eigen::Index>(s)]);
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
            const double a = coupled[mi].f0[static_cast<Eigen::Index>(s)];
            const double b = memory[mi].f0[static_cast<Eigen::Index>(s)];
            out << ',' << hcj::format_double(a) << ',' << hcj::format_double(b);
            worst = std::max(worst, std::abs(a - b));
        }
        out << '\n';
    }
    hcj::write_text_file(args.out_path, out.str());
    hcj::RunManifest man = make_manifest("memory", text, arc.config.seed);
    man.outputs.push_back(args.out_path);
    finish_manifest(man, args.out_path);
    std::cout << "lambda0 = " << hcj::format_double(ktab.lambda0)
              << ", max |coupled - memory| = " << hcj::format_double(worst) << "\n";
    return 0;
}

int run_spectrum(const CommonArgs& args, double lmax, int samples) {
    const std::string text = hcj::read_text_file(args.cell_path);
    const hcj::CellArchive arc = hcj::read_cell_json(args.cell_path);
    const hcj::Model model = arc.config.build_model();
    const hcj::SpectralReport rep = hcj::spectral_report(model, lmax, samples);

    nlohmann::json j;
    j["sigma1"] = std::vector<double>(rep.sigma1.data(), rep.sigma1.data() + rep.sigma1.size());
    nlohmann::json samples_json = nlohmann::json::array();
    for (const auto& s : rep.sigma2.samples)
        samples_json.push_back({{"lambda", s.lambda}, {"h", s.h}, {"flagged", s.flagged}});
    j["sigma2_samples"] = samples_json;
    j["lambda1"] = rep.sigma2.lambda1;
    j["lambda2"] = rep.sigma2.lambda2;
    j["guard"] = rep.sigma2.guard;
    j["conflicts"] = rep.sigma2.conflicts;
    j["rho"] = rep.perron.rho;
    j["rho_eigensolve"] = rep.perron.rho_eigensolve;
    j["beta1"] = rep.perron.beta1;
    j["beta2"] = rep.perron.beta2;
    j["phi_range"] = {rep.phi_min, rep.phi_max};
    j["gamma"] = {rep.gamma1, rep.gamma2};
    j["gamma_fold"] = {rep.gamma1_fold, rep.gamma2_fold};
    hcj::write_text_file(args.out_path, j.dump(2) + "\n");
    hcj::RunManifest man = make_manifest("spectrum", text, arc.config.seed);
    man.outputs.push_back(args.out_path);
    finish_manifest(man, args.out_path);
    std::cout << "sigma1 extremes: " << rep.sigma1.minCoeff() << " .. " << rep.sigma1.maxCoeff()
              << ", lambda1 = " << rep.sigma2.lambda1 << ", lambda2 = " << rep.sigma2.lambda2
              << ", rho = " << rep.perron.rho << "\n";
    return 0;
}

int run_converge(const CommonArgs& args, const std::string& eps_csv, std::size_t points,
                 std::uint64_t seed) {
    const std::string text = hcj::read_text_file(args.config_path);
    const hcj::Config cfg = hcj::Config::from_string(text, args.config_path);
    const hcj::EffectiveModel em =
        hcj::solve_effective_model(cfg.build_model(), cfg.theta_tol, cfg.compat_tol);
    const hcj::TestFunctionPair pair = default_pair(em.model);
    const std::vector<double> eps_list = parse_list(eps_csv);
    const hcj::ResidualReport rep = hcj::generator_residual(em, pair, eps_list, points, seed);

    nlohmann::json j;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"eps", r.eps}, {"fast_sup", r.fast_sup}, {"slow_sup", r.slow_sup}});
        std::cout << "eps " << r.eps << ": fast " << hcj::format_double(r.fast_sup) << ", slow "
                  << hcj::format_double(r.slow_sup) << "\n";
    }
    j["rows"] = rows;
    j["slope"] = rep.slope;
    j["points_per_phase"] = rep.points_per_phase;
    hcj::write_text_file(args.out_path, j.dump(2) + "\n");
    hcj::RunManifest man = make_manifest("converge", text, seed);
    man.outputs.push_back(args.out_path);
    finish_manifest(man, args.out_path);
    std::cout << "fitted decay order: " << rep.slope << "\n";
    return 0;
}

int run_law_test(const CommonArgs& args, const std::string& eps_paths,
                 const std::string& limit_paths, const std::string& times_csv) {
    const hcj::PathsCsv a = hcj::read_paths_csv(eps_paths);
    const hcj::PathsCsv b = hcj::read_paths_csv(limit_paths);
    const std::vector<double> times = parse_list(times_csv);
    std::vector<hcj::MarginalSamples> ma, mb;
    for (double t : times) {
        ma.push_back(hcj::marginals_at(a, t));
        mb.push_back(hcj::marginals_at(b, t));
    }
    const hcj::LawReport rep = hcj::law_distance(times, ma, mb, 200, 1234);

    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        j.push_back({{"t", r.t},
                     {"ks", r.ks},
                     {"ks_band", {r.band.lo, r.band.hi}},
                     {"phase_freq_eps", r.phase_freq_a},
                     {"phase_freq_limit", r.phase_freq_b},
                     {"phase_diff", r.phase_diff},
                     {"mean", {r.mean_a, r.mean_b}},
                     {"var", {r.var_a, r.var_b}},
                     {"cos_moment", {r.cos_a, r.cos_b}}});
        std::cout << "t = " << r.t << ": KS " << r.ks << " [" << r.band.lo << ", " << r.band.hi
                  << "], phase diff " << r.phase_diff << "\n";
    }
    hcj::write_text_file(args.out_path, j.dump(2) + "\n");
    hcj::RunManifest man = make_manifest("law-test", eps_paths + "|" + limit_paths, 0);
    man.outputs.push_back(args.out_path);
    finish_manifest(man, args.out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"high-contrast periodic jump processes: cell problems, simulators, spectra"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    app.add_flag("--json-diagnostics", args.json_diagnostics,
                 "emit machine-readable errors on stdout");
    app.add_option("--threads", args.threads, "worker threads (default HCJUMP_THREADS or 1)");

    auto* validate = app.add_subcommand("validate", "check the standing assumptions");
    validate->add_option("--config", args.config_path)->required();
    validate->add_option("--out", args.out_path);

    std::string csv_path;
    auto* solve = app.add_subcommand("solve-cell", "solve the cell problems, emit theta");
    solve->add_option("--config", args.config_path)->required();
    solve->add_option("--out", args.out_path)->required();
    solve->add_option("--csv", csv_path);

    double eps = 0.1, horizon = 1.0, dt = 1e-3, lmax = 5.0;
    std::size_t paths = 1000, points = 1000;
    std::uint64_t seed = 1;
    int samples = 400;
    std::string times_csv, summary_path, modes_csv = "0,1,2";
    std::string eps_paths, limit_paths, eps_csv = "0.2,0.1,0.05";

    auto* sim_eps = app.add_subcommand("simulate-eps", "Monte Carlo of the eps-scale process");
    sim_eps->add_option("--config", args.config_path)->required();
    sim_eps->add_option("--eps", eps)->required();
    sim_eps->add_option("--paths", paths)->required();
    sim_eps->add_option("--horizon", horizon)->required();
    sim_eps->add_option("--seed", seed);
    sim_eps->add_option("--times", times_csv);
    sim_eps->add_option("--out", args.out_path)->required();
    sim_eps->add_option("--summary", summary_path);

    auto* sim_lim = app.add_subcommand("simulate-limit", "Monte Carlo of the limit process");
    sim_lim->add_option("--cell", args.cell_path)->required();
    sim_lim->add_option("--paths", paths)->required();
    sim_lim->add_option("--horizon", horizon)->required();
    sim_lim->add_option("--seed", seed);
    sim_lim->add_option("--times", times_csv);
    sim_lim->add_option("--out", args.out_path)->required();
    sim_lim->add_option("--summary", summary_path);

    auto* memory = app.add_subcommand("memory", "memory-kernel evolution of the spatial modes");
    memory->add_option("--cell", args.cell_path)->required();
    memory->add_option("--modes", modes_csv);
    memory->add_option("--T", horizon)->required();
    memory->add_option("--dt", dt);
    memory->add_option("--out", args.out_path)->required();

    auto* spectrum = app.add_subcommand("spectrum", "spectral analysis of the limit generator");
    spectrum->add_option("--cell", args.cell_path)->required();
    spectrum->add_option("--lmax", lmax);
    spectrum->add_option("--samples", samples);
    spectrum->add_option("--out", args.out_path)->required();

    auto* converge = app.add_subcommand("converge", "generator-residual refinement study");
    converge->add_option("--config", args.config_path)->required();
    converge->add_option("--eps", eps_csv);
    converge->add_option("--points", points);
    converge->add_option("--seed", seed);
    converge->add_option("--out", args.out_path)->required();

    auto* law = app.add_subcommand("law-test", "compare eps-scale and limit marginals");
    law->add_option("--eps-paths", eps_paths)->required();
    law->add_option("--limit-paths", limit_paths)->required();
    law->add_option("--times", times_csv)->required();
    law->add_option("--out", args.out_path)->required();

    // global flags remain usable after the subcommand name
    for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    auto emit_error = [&](const std::string& code, const std::string& what, int rc) {
        if (args.json_diagnostics) {
            nlohmann::json j;
            j["error"] = code;
            j["message"] = what;
            std::cout << j.dump() << "\n";
        } else {
            std::cerr << "error [" << code << "]: " << what << "\n";
        }
        return rc;
    };

    try {
        if (validate->parsed()) return run_validate(args);
        if (solve->parsed()) return run_solve_cell(args, csv_path);
        if (sim_eps->parsed())
            return run_simulate_eps(args, eps, paths, horizon, seed, times_csv, summary_path);
        if (sim_lim->parsed())
            return run_simulate_limit(args, paths, horizon, seed, times_csv, summary_path);
        if (memory->parsed()) return run_memory(args, modes_csv, horizon, dt);
        if (spectrum->parsed()) return run_spectrum(args, lmax, samples);
        if (converge->parsed()) return run_converge(args, eps_csv, points, seed);
        if (law->parsed()) return run_law_test(args, eps_paths, limit_paths, times_csv);
    } catch (const hcj::ValidationError& e) {
        return emit_error(e.code(), e.what(), 2);
    } catch (const hcj::NumericError& e) {
        return emit_error(e.code(), e.what(), 3);
    } catch (const hcj::IoError& e) {
        return emit_error("IoError", e.what(), 4);
    } catch (const std::exception& e) {
        return emit_error("Internal", e.what(), 70);
    }
    return 64;
}
