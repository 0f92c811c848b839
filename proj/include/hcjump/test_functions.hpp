#pragma once

#include "hcjump/field.hpp"
#include "hcjump/model.hpp"

#include <Eigen/Core>

namespace hcj {

// Closed-form rapidly decaying spatial profiles with exact derivatives:
// gaussian bumps times trigonometric factors, plus affine and constant
// variants for edge-case checks.
struct XProfile {
    enum class Kind { gauss_cos, affine, constant };
    Kind kind = Kind::gauss_cos;
    int dim = 1;

    double amplitude = 1.0;
    Point center{};
    double sigma = 1.0;
    Point freq{};
    double phase = 0.0;
    Point slope{};
    double offset = 0.0;

    double value(const Point& x) const;
    Point gradient(const Point& x) const;
    Eigen::MatrixXd hessian(const Point& x) const;

    static XProfile constant(int dim, double c);
    static XProfile affine(int dim, double offset, const Point& slope);
    static XProfile gaussian(int dim, double amplitude, const Point& center, double sigma,
                             const Point& freq = {}, double phase = 0.0);
};

// Test pair F = (f0, g): f0 closed-form on R^d, g separable as a closed
// form in x times a grid field in xi on G.
struct TestFunctionPair {
    XProfile f0;
    XProfile gx;
    Eigen::VectorXd g_xi; // values on G cells (compact index)

    double g_at_cell(const Point& x, std::size_t g_compact) const {
        return gx.value(x) * g_xi[g_compact];
    }
    double g_interp(const Model& model, const Point& x, const Point& xi) const {
        return gx.value(x) * eval_field(model.grid, Phase::G, g_xi, xi);
    }
    double sup_norm_bound(const Model& model) const; // max over f0 peak and g grid
};

} // namespace hcj
