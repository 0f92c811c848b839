#pragma once

#include "hcjump/cell_solver.hpp"
#include "hcjump/config.hpp"

#include <string>

namespace hcjtest {

// canonical 1d configuration: Y = (0, 0.5), G = (0.5, 1),
// a(z) = 0.5 on |z| <= 1, w = 1
inline hcj::Config box1d_config(int n = 512) {
    std::string text = R"([geometry]
dim = 1
g_boxes = [[0.5], [1.0]]

[kernel]
family = "box"
radius = 1.0
amplitude = 0.5

[contrast]
kind = "constant"
value = 1.0

[grid]
n = )" + std::to_string(n) + "\n";
    return hcj::Config::from_string(text, "box1d");
}

// canonical 2d configuration: G = (0.25, 0.75)^2, a = 0.25 on |z|_inf <= 1
inline hcj::Config box2d_config(int n = 128) {
    std::string text = R"([geometry]
dim = 2
g_boxes = [[0.25, 0.25], [0.75, 0.75]]

[kernel]
family = "box"
radius = 1.0
amplitude = 0.25

[contrast]
kind = "constant"
value = 1.0

[grid]
n = )" + std::to_string(n) + "\n";
    return hcj::Config::from_string(text, "box2d");
}

// box1d geometry with a non-constant symmetric contrast
inline hcj::Config wcos_config(int n = 256) {
    std::string text = R"([geometry]
dim = 1
g_boxes = [[0.5], [1.0]]

[kernel]
family = "box"
radius = 1.0
amplitude = 0.5

[contrast]
kind = "separable"
q_base = 1.0
q_amp = 0.3
q_freq = [1]

[grid]
n = )" + std::to_string(n) + "\n";
    return hcj::Config::from_string(text, "wcos");
}

// kernel support 0.5: no jump bridges the slow band, windings vanish
inline hcj::Config disconnected_config(int n = 512) {
    std::string text = R"([geometry]
dim = 1
g_boxes = [[0.5], [1.0]]

[kernel]
family = "box"
radius = 0.5
amplitude = 0.5

[contrast]
kind = "constant"
value = 1.0

[grid]
n = )" + std::to_string(n) + "\n";
    return hcj::Config::from_string(text, "disconnected");
}

inline const hcj::Model& box1d_model() {
    static const hcj::Model m = box1d_config().build_model();
    return m;
}

inline const hcj::Model& box2d_model_small() {
    static const hcj::Model m = box2d_config(48).build_model();
    return m;
}

inline const hcj::Model& wcos_model() {
    static const hcj::Model m = wcos_config().build_model();
    return m;
}

inline const hcj::EffectiveModel& box1d_effective() {
    static const hcj::EffectiveModel em = hcj::solve_effective_model(box1d_config().build_model());
    return em;
}

inline const hcj::EffectiveModel& wcos_effective() {
    static const hcj::EffectiveModel em = hcj::solve_effective_model(wcos_config().build_model());
    return em;
}

inline const hcj::EffectiveModel& box2d_effective_small() {
    static const hcj::EffectiveModel em =
        hcj::solve_effective_model(box2d_config(48).build_model());
    return em;
}

} // namespace hcjtest
