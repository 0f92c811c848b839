#pragma once

#include "hcjump/config.hpp"
#include "hcjump/convergence.hpp"
#include "hcjump/eps_process.hpp"
#include "hcjump/limit_process.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hcj {

std::string format_double(double v); // shortest round-trip decimal

// stable non-cryptographic digest used in manifests
std::uint64_t fnv1a_hash(const std::string& bytes);
std::string fnv1a_hex(const std::string& bytes);

struct RunManifest {
    std::string tool_version;
    std::string subcommand;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::string started_at;
    std::string finished_at;
};
void write_manifest(const RunManifest& manifest, const std::string& path);

// path CSV schema: path,t,x_0..x_{d-1},star,k_0..k_{d-1}
void write_eps_paths_csv(const std::string& path, const std::vector<EpsTrajectory>&, int dim,
                         double eps);
void write_limit_paths_csv(const std::string& path, const std::vector<LimitPath>&,
                           const Model& model);

struct PathsCsv {
    int dim = 1;
    std::vector<std::size_t> path_id;
    std::vector<double> t;
    std::vector<std::array<double, kMaxDim>> x;
    std::vector<std::uint8_t> star;
};
PathsCsv read_paths_csv(const std::string& path);

// marginal extraction by nearest recorded time at-or-before t
MarginalSamples marginals_at(const PathsCsv& paths, double t);

// effective-model archive: config + effective matrix + diagnostics
void write_cell_json(const std::string& path, const Config& cfg, const EffectiveModel& em);
struct CellArchive {
    Config config;
    Eigen::MatrixXd theta;
    Eigen::MatrixXd theta_identity;
    double theta_mismatch = 0.0;
};
CellArchive read_cell_json(const std::string& path);

void write_corrector_csv(const std::string& path, const EffectiveModel& em);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace hcj
