#include "hcjump/config.hpp"

#include "hcjump/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace hcj {

namespace {

struct Node {
    enum class Kind { number, string, array } kind = Kind::number;
    double num = 0.0;
    std::string str;
    std::vector<Node> arr;
};

class ValueParser {
public:
    ValueParser(const std::string& s, const std::string& origin) : s_(s), origin_(origin) {}

    Node parse() {
        Node n = value();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters after value");
        return n;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw IoError(origin_ + ": " + what + " in '" + s_ + "'");
    }
    Node value() {
        skip_ws();
        if (pos_ >= s_.size()) fail("missing value");
        const char c = s_[pos_];
        if (c == '[') return array();
        if (c == '"') return string_lit();
        return number();
    }
    Node array() {
        Node n;
        n.kind = Node::Kind::array;
        ++pos_; // [
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return n;
        }
        while (true) {
            n.arr.push_back(value());
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                continue;
            }
            if (pos_ < s_.size() && s_[pos_] == ']') {
                ++pos_;
                return n;
            }
            fail("expected ',' or ']'");
        }
    }
    Node string_lit() {
        Node n;
        n.kind = Node::Kind::string;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') n.str.push_back(s_[pos_++]);
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return n;
    }
    Node number() {
        Node n;
        std::size_t end = pos_;
        while (end < s_.size() && std::string("+-0123456789.eE_").find(s_[end]) != std::string::npos)
            ++end;
        std::string tok = s_.substr(pos_, end - pos_);
        if (tok.empty()) fail("expected a number");
        try {
            n.num = std::stod(tok);
        } catch (...) {
            fail("bad number '" + tok + "'");
        }
        pos_ = end;
        return n;
    }

    const std::string& s_;
    std::string origin_;
    std::size_t pos_ = 0;
};

using Table = std::map<std::string, std::map<std::string, Node>>;

Table parse_toml(const std::string& text, const std::string& origin) {
    Table table;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside strings
        bool in_str = false;
        std::string clean;
        for (char c : line) {
            if (c == '"') in_str = !in_str;
            if (c == '#' && !in_str) break;
            clean.push_back(c);
        }
        std::size_t b = clean.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = clean.find_last_not_of(" \t\r");
        clean = clean.substr(b, e - b + 1);
        if (clean.empty()) continue;

        if (clean.front() == '[') {
            const std::size_t close = clean.find(']');
            if (close == std::string::npos)
                throw IoError(origin + ":" + std::to_string(lineno) + ": bad section header");
            section = clean.substr(1, close - 1);
            continue;
        }
        const std::size_t eq = clean.find('=');
        if (eq == std::string::npos)
            throw IoError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = clean.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        const std::string val = clean.substr(eq + 1);
        table[section][key] =
            ValueParser(val, origin + ":" + std::to_string(lineno)).parse();
    }
    return table;
}

const Node* find(const Table& t, const std::string& sec, const std::string& key) {
    auto si = t.find(sec);
    if (si == t.end()) return nullptr;
    auto ki = si->second.find(key);
    if (ki == si->second.end()) return nullptr;
    return &ki->second;
}

double num_or(const Table& t, const std::string& sec, const std::string& key, double dflt) {
    const Node* n = find(t, sec, key);
    return n ? n->num : dflt;
}

std::string str_or(const Table& t, const std::string& sec, const std::string& key,
                   const std::string& dflt) {
    const Node* n = find(t, sec, key);
    return n ? n->str : dflt;
}

Point point_from(const Node& n, int dim, const std::string& what) {
    Point p{};
    if (n.kind != Node::Kind::array || static_cast<int>(n.arr.size()) < dim)
        throw IoError(what + ": expected an array of " + std::to_string(dim) + " numbers");
    for (int i = 0; i < dim; ++i) p[i] = n.arr[static_cast<std::size_t>(i)].num;
    return p;
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

Config Config::from_string(const std::string& text, const std::string& origin) {
    const Table t = parse_toml(text, origin);
    Config cfg;
    cfg.dim = static_cast<int>(num_or(t, "geometry", "dim", 1));
    if (cfg.dim < 1 || cfg.dim > kMaxDim) throw IoError(origin + ": dim must be 1..3");

    if (const Node* boxes = find(t, "geometry", "g_boxes")) {
        if (boxes->kind != Node::Kind::array || boxes->arr.size() % 2 != 0)
            throw IoError(origin + ": g_boxes must be [[lo..],[hi..]] pairs");
        for (std::size_t i = 0; i + 1 < boxes->arr.size(); i += 2) {
            Region r;
            r.kind = Region::Kind::box;
            r.lo = point_from(boxes->arr[i], cfg.dim, "g_boxes lo");
            r.hi = point_from(boxes->arr[i + 1], cfg.dim, "g_boxes hi");
            cfg.g_regions.push_back(r);
        }
    }
    if (const Node* balls = find(t, "geometry", "g_balls")) {
        for (const Node& b : balls->arr) {
            if (b.kind != Node::Kind::array || static_cast<int>(b.arr.size()) != cfg.dim + 1)
                throw IoError(origin + ": g_balls entries are [center.., radius]");
            Region r;
            r.kind = Region::Kind::ball;
            for (int k = 0; k < cfg.dim; ++k) r.center[k] = b.arr[static_cast<std::size_t>(k)].num;
            r.radius = b.arr.back().num;
            cfg.g_regions.push_back(r);
        }
    }

    cfg.family = kernel_family_from_string(str_or(t, "kernel", "family", "box"));
    cfg.radius = num_or(t, "kernel", "radius", 1.0);
    cfg.amplitude = num_or(t, "kernel", "amplitude", 1.0);
    cfg.width = num_or(t, "kernel", "width", 1.0);
    if (const Node* c = find(t, "kernel", "center"))
        cfg.kernel_center = point_from(*c, cfg.dim, "kernel center");

    const std::string kind = str_or(t, "contrast", "kind", "constant");
    if (kind == "constant")
        cfg.contrast_kind = ContrastField::Kind::constant;
    else if (kind == "separable")
        cfg.contrast_kind = ContrastField::Kind::separable;
    else if (kind == "grid")
        cfg.contrast_kind = ContrastField::Kind::grid;
    else
        throw IoError(origin + ": unknown contrast kind '" + kind + "'");
    cfg.contrast_value = num_or(t, "contrast", "value", 1.0);
    cfg.q_base = num_or(t, "contrast", "q_base", 1.0);
    cfg.q_amp = num_or(t, "contrast", "q_amp", 0.0);
    if (const Node* f = find(t, "contrast", "q_freq")) {
        for (int k = 0; k < cfg.dim && k < static_cast<int>(f->arr.size()); ++k)
            cfg.q_freq[static_cast<std::size_t>(k)] =
                static_cast<int>(f->arr[static_cast<std::size_t>(k)].num);
    }
    cfg.grid_path = str_or(t, "contrast", "grid_path", "");

    cfg.n = static_cast<int>(num_or(t, "grid", "n", 128));
    if (cfg.n < 2) throw IoError(origin + ": grid n must be at least 2");

    cfg.fold_tol = num_or(t, "tolerances", "fold_tol", 1e-12);
    cfg.theta_tol = num_or(t, "tolerances", "theta_tol", 1e-3);
    cfg.compat_tol = num_or(t, "tolerances", "compat_tol", 1e-8);

    if (const Node* x0 = find(t, "simulation", "x0"))
        cfg.x0 = point_from(*x0, cfg.dim, "simulation x0");
    cfg.seed = static_cast<std::uint64_t>(num_or(t, "simulation", "seed", 1.0));
    return cfg;
}

CellGeometry Config::geometry() const {
    CellGeometry g;
    g.dim = dim;
    g.g_regions = g_regions;
    return g;
}

Kernel Config::kernel() const {
    Kernel k;
    k.family = family;
    k.dim = dim;
    k.radius = radius;
    k.amplitude = amplitude;
    k.width = width;
    k.center = kernel_center;
    return k;
}

ContrastField Config::contrast() const {
    ContrastField w;
    w.kind = contrast_kind;
    w.dim = dim;
    w.value = contrast_value;
    w.q_base = q_base;
    w.q_amp = q_amp;
    w.q_freq = q_freq;
    if (w.kind == ContrastField::Kind::grid) {
        if (dim != 1) throw IoError("grid contrast tables are supported in one dimension only");
        std::ifstream in(grid_path);
        if (!in) throw IoError("cannot open contrast grid: " + grid_path);
        std::string line;
        std::vector<std::vector<double>> rows;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::istringstream ls(line);
            std::string tok;
            while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
            rows.push_back(row);
        }
        w.table_n = static_cast<int>(rows.size());
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != w.table_n)
                throw IoError("contrast grid must be square: " + grid_path);
            w.table.insert(w.table.end(), row.begin(), row.end());
        }
    }
    return w;
}

Model Config::build_model() const {
    return hcj::build_model(geometry(), kernel(), contrast(), n, fold_tol);
}

std::string config_to_json(const Config& cfg) {
    nlohmann::json j;
    j["geometry"]["dim"] = cfg.dim;
    auto& regions = j["geometry"]["regions"];
    regions = nlohmann::json::array();
    for (const auto& r : cfg.g_regions) {
        nlohmann::json jr;
        jr["kind"] = r.kind == Region::Kind::box ? "box" : "ball";
        jr["lo"] = std::vector<double>(r.lo.begin(), r.lo.begin() + cfg.dim);
        jr["hi"] = std::vector<double>(r.hi.begin(), r.hi.begin() + cfg.dim);
        jr["center"] = std::vector<double>(r.center.begin(), r.center.begin() + cfg.dim);
        jr["radius"] = r.radius;
        regions.push_back(jr);
    }
    j["kernel"]["family"] = to_string(cfg.family);
    j["kernel"]["radius"] = cfg.radius;
    j["kernel"]["amplitude"] = cfg.amplitude;
    j["kernel"]["width"] = cfg.width;
    j["kernel"]["center"] =
        std::vector<double>(cfg.kernel_center.begin(), cfg.kernel_center.begin() + cfg.dim);
    j["contrast"]["kind"] = cfg.contrast_kind == ContrastField::Kind::constant ? "constant"
                            : cfg.contrast_kind == ContrastField::Kind::separable ? "separable"
                                                                                  : "grid";
    j["contrast"]["value"] = cfg.contrast_value;
    j["contrast"]["q_base"] = cfg.q_base;
    j["contrast"]["q_amp"] = cfg.q_amp;
    j["contrast"]["q_freq"] =
        std::vector<int>(cfg.q_freq.begin(), cfg.q_freq.begin() + cfg.dim);
    j["contrast"]["grid_path"] = cfg.grid_path;
    j["grid"]["n"] = cfg.n;
    j["tolerances"]["fold_tol"] = cfg.fold_tol;
    j["tolerances"]["theta_tol"] = cfg.theta_tol;
    j["tolerances"]["compat_tol"] = cfg.compat_tol;
    j["simulation"]["x0"] = std::vector<double>(cfg.x0.begin(), cfg.x0.begin() + cfg.dim);
    j["simulation"]["seed"] = cfg.seed;
    return j.dump(2);
}

Config config_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    Config cfg;
    cfg.dim = j["geometry"]["dim"].get<int>();
    for (const auto& jr : j["geometry"]["regions"]) {
        Region r;
        r.kind = jr["kind"].get<std::string>() == "box" ? Region::Kind::box : Region::Kind::ball;
        const auto lo = jr["lo"].get<std::vector<double>>();
        const auto hi = jr["hi"].get<std::vector<double>>();
        const auto ce = jr["center"].get<std::vector<double>>();
        for (int k = 0; k < cfg.dim; ++k) {
            r.lo[k] = lo[static_cast<std::size_t>(k)];
            r.hi[k] = hi[static_cast<std::size_t>(k)];
            r.center[k] = ce[static_cast<std::size_t>(k)];
        }
        r.radius = jr["radius"].get<double>();
        cfg.g_regions.push_back(r);
    }
    cfg.family = kernel_family_from_string(j["kernel"]["family"].get<std::string>());
    cfg.radius = j["kernel"]["radius"].get<double>();
    cfg.amplitude = j["kernel"]["amplitude"].get<double>();
    cfg.width = j["kernel"]["width"].get<double>();
    const auto kc = j["kernel"]["center"].get<std::vector<double>>();
    for (int k = 0; k < cfg.dim; ++k) cfg.kernel_center[k] = kc[static_cast<std::size_t>(k)];

    const std::string kind = j["contrast"]["kind"].get<std::string>();
    cfg.contrast_kind = kind == "constant" ? ContrastField::Kind::constant
                        : kind == "separable" ? ContrastField::Kind::separable
                                              : ContrastField::Kind::grid;
    cfg.contrast_value = j["contrast"]["value"].get<double>();
    cfg.q_base = j["contrast"]["q_base"].get<double>();
    cfg.q_amp = j["contrast"]["q_amp"].get<double>();
    const auto qf = j["contrast"]["q_freq"].get<std::vector<int>>();
    for (int k = 0; k < cfg.dim && k < static_cast<int>(qf.size()); ++k)
        cfg.q_freq[static_cast<std::size_t>(k)] = qf[static_cast<std::size_t>(k)];
    cfg.grid_path = j["contrast"]["grid_path"].get<std::string>();
    cfg.n = j["grid"]["n"].get<int>();
    cfg.fold_tol = j["tolerances"]["fold_tol"].get<double>();
    cfg.theta_tol = j["tolerances"]["theta_tol"].get<double>();
    cfg.compat_tol = j["tolerances"]["compat_tol"].get<double>();
    const auto x0 = j["simulation"]["x0"].get<std::vector<double>>();
    for (int k = 0; k < cfg.dim; ++k) cfg.x0[k] = x0[static_cast<std::size_t>(k)];
    cfg.seed = j["simulation"]["seed"].get<std::uint64_t>();
    return cfg;
}

} // namespace hcj
