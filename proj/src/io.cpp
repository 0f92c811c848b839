#include "hcjump/io.hpp"

#include "hcjump/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hcj {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(bytes)));
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    nlohmann::json j;
    j["tool_version"] = manifest.tool_version;
    j["subcommand"] = manifest.subcommand;
    j["config_hash"] = manifest.config_hash;
    j["seed"] = manifest.seed;
    j["outputs"] = manifest.outputs;
    j["started_at"] = manifest.started_at;
    j["finished_at"] = manifest.finished_at;
    write_text_file(path, j.dump(2) + "\n");
}

namespace {

void write_state_row(std::ostream& out, std::size_t id, double t, const Point& x, bool star,
                     const Point& k, int dim) {
    out << id << ',' << format_double(t);
    for (int c = 0; c < dim; ++c) out << ',' << format_double(x[c]);
    out << ',' << (star ? 1 : 0);
    for (int c = 0; c < dim; ++c) out << ',' << format_double(star ? 0.0 : k[c]);
    out << '\n';
}

std::string csv_header(int dim) {
    std::ostringstream h;
    h << "path,t";
    for (int c = 0; c < dim; ++c) h << ",x_" << c;
    h << ",star";
    for (int c = 0; c < dim; ++c) h << ",k_" << c;
    h << '\n';
    return h.str();
}

} // namespace

void write_eps_paths_csv(const std::string& path, const std::vector<EpsTrajectory>& trajs,
                         int dim, double eps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << csv_header(dim);
    for (std::size_t id = 0; id < trajs.size(); ++id) {
        for (const auto& e : trajs[id].entries) {
            Point k{};
            if (!e.fast) {
                for (int c = 0; c < dim; ++c) {
                    const double s = e.x[c] / eps;
                    k[c] = s - std::floor(s);
                }
            }
            write_state_row(out, id, e.t, e.x, e.fast, k, dim);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_limit_paths_csv(const std::string& path, const std::vector<LimitPath>& paths,
                           const Model& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << csv_header(model.grid.dim);
    for (std::size_t id = 0; id < paths.size(); ++id) {
        for (const auto& e : paths[id].events) {
            Point k{};
            if (e.k >= 0)
                model.grid.center(model.grid.g_cells[static_cast<std::size_t>(e.k)], k);
            write_state_row(out, id, e.t, e.x, e.k < 0, k, model.grid.dim);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

PathsCsv read_paths_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty paths file: " + path);
    int dim = 0;
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ','))
            if (col.rfind("x_", 0) == 0) ++dim;
    }
    if (dim < 1 || dim > kMaxDim) throw IoError("bad header in " + path);

    PathsCsv out;
    out.dim = dim;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
        if (static_cast<int>(vals.size()) != 2 + 2 * dim + 1)
            throw IoError("bad row in " + path);
        out.path_id.push_back(static_cast<std::size_t>(vals[0]));
        out.t.push_back(vals[1]);
        std::array<double, kMaxDim> x{};
        for (int c = 0; c < dim; ++c) x[static_cast<std::size_t>(c)] = vals[2 + c];
        out.x.push_back(x);
        out.star.push_back(vals[2 + dim] != 0.0 ? 1 : 0);
    }
    return out;
}

MarginalSamples marginals_at(const PathsCsv& paths, double t) {
    MarginalSamples m;
    // rows are grouped by path and ordered in time
    std::size_t cur = static_cast<std::size_t>(-1);
    double best_t = -1.0;
    double best_x = 0.0;
    std::uint8_t best_star = 0;
    bool have = false;
    auto flush = [&]() {
        if (have) {
            m.x_first.push_back(best_x);
            m.star.push_back(best_star);
        }
    };
    for (std::size_t i = 0; i < paths.t.size(); ++i) {
        if (paths.path_id[i] != cur) {
            flush();
            cur = paths.path_id[i];
            best_t = -1.0;
            have = false;
        }
        if (paths.t[i] <= t && paths.t[i] >= best_t) {
            best_t = paths.t[i];
            best_x = paths.x[i][0];
            best_star = paths.star[i];
            have = true;
        }
    }
    flush();
    return m;
}

void write_cell_json(const std::string& path, const Config& cfg, const EffectiveModel& em) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config_to_json(cfg));
    const int d = em.model.grid.dim;
    auto mat = [&](const Eigen::MatrixXd& m) {
        std::vector<std::vector<double>> rows;
        for (int r = 0; r < d; ++r) {
            std::vector<double> row;
            for (int c = 0; c < d; ++c) row.push_back(m(r, c));
            rows.push_back(row);
        }
        return rows;
    };
    j["theta"] = mat(em.theta);
    j["theta_identity"] = mat(em.theta_identity);
    j["theta_mismatch"] = em.theta_mismatch;
    j["phi_compat"] = em.phi_compat;
    j["kappa_compat"] = em.kappa_compat;
    j["phi_residual"] = em.phi_residual;
    j["kappa_residual"] = em.kappa_residual;
    j["connectivity"] = em.connectivity.summary();
    write_text_file(path, j.dump(2) + "\n");
}

CellArchive read_cell_json(const std::string& path) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    CellArchive arc;
    arc.config = config_from_json(j["config"].dump());
    const int d = arc.config.dim;
    arc.theta.resize(d, d);
    arc.theta_identity.resize(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            arc.theta(r, c) = j["theta"][r][c].get<double>();
            arc.theta_identity(r, c) = j["theta_identity"][r][c].get<double>();
        }
    arc.theta_mismatch = j["theta_mismatch"].get<double>();
    return arc;
}

void write_corrector_csv(const std::string& path, const EffectiveModel& em) {
    const GridDiscretization& grid = em.model.grid;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    const int d = grid.dim;
    out << "cell";
    for (int c = 0; c < d; ++c) out << ",xi_" << c;
    for (int c = 0; c < d; ++c) out << ",phi_" << c;
    for (int c = 0; c < d * d; ++c) out << ",kappa_" << c;
    out << '\n';
    Point xi{};
    for (std::size_t i = 0; i < grid.y_count(); ++i) {
        grid.center(grid.y_cells[i], xi);
        out << grid.y_cells[i];
        for (int c = 0; c < d; ++c) out << ',' << format_double(xi[c]);
        for (int c = 0; c < d; ++c) out << ',' << format_double(em.phi.values(i, c));
        for (int c = 0; c < d * d; ++c) out << ',' << format_double(em.kappa.values(i, c));
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace hcj
