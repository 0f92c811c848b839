#pragma once

#include "hcjump/contrast.hpp"
#include "hcjump/geometry.hpp"
#include "hcjump/kernel.hpp"
#include "hcjump/model.hpp"

#include <cstdint>
#include <string>

namespace hcj {

// Parsed run configuration (TOML-style structured text, see docs/formats.md).
struct Config {
    int dim = 1;
    std::vector<Region> g_regions;

    KernelFamily family = KernelFamily::box;
    double radius = 1.0;
    double amplitude = 1.0;
    double width = 1.0;
    Point kernel_center{};

    ContrastField::Kind contrast_kind = ContrastField::Kind::constant;
    double contrast_value = 1.0;
    double q_base = 1.0, q_amp = 0.0;
    std::array<int, kMaxDim> q_freq{};
    std::string grid_path;

    int n = 128;

    double fold_tol = 1e-12;
    double theta_tol = 1e-3;
    double compat_tol = 1e-8;

    Point x0{};
    std::uint64_t seed = 1;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text, const std::string& origin = "<string>");

    CellGeometry geometry() const;
    Kernel kernel() const;
    ContrastField contrast() const;
    Model build_model() const;
};

std::string config_to_json(const Config& cfg);
Config config_from_json(const std::string& json_text);

} // namespace hcj
