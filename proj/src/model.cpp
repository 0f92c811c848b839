#include "hcjump/model.hpp"

#include "hcjump/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hcj {

double FoldedKernel::operator()(const Point& zeta) const {
    const Point z = torus_wrap(zeta, dim);
    double s = 0.0;
    Point arg{};
    int shift[kMaxDim] = {0, 0, 0};
    const int S = shift_radius;
    const int span = 2 * S + 1;
    int count = 1;
    for (int i = 0; i < dim; ++i) count *= span;
    for (int c = 0; c < count; ++c) {
        int rem = c;
        for (int i = 0; i < dim; ++i) {
            shift[i] = rem % span - S;
            rem /= span;
        }
        for (int i = 0; i < dim; ++i) arg[i] = z[i] + shift[i];
        s += kernel.value(arg);
    }
    return s;
}

FoldedKernel fold_kernel(const Kernel& kern, const GridDiscretization& grid, double tol) {
    if (!(tol > 0.0)) throw NumericError("BadTolerance", "fold tolerance must be positive");
    FoldedKernel f;
    f.dim = grid.dim;
    f.n = grid.n;
    f.kernel = kern;
    // compact support: the smallest integer shift radius covering the
    // support leaves zero tail mass, so any positive tol is met exactly
    f.shift_radius = static_cast<int>(std::ceil(kern.support_radius_inf())) + 1;
    f.table.resize(grid.total);
    Point zeta{};
    int idx[kMaxDim];
    for (std::size_t o = 0; o < grid.total; ++o) {
        grid.decode(o, idx);
        for (int i = 0; i < grid.dim; ++i) zeta[i] = idx[i] * grid.h;
        f.table[o] = f(zeta);
    }
    return f;
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

ValidationReport validate_inputs(const CellGeometry& geom, const Kernel& kern,
                                 const ContrastField& w, const GridDiscretization* grid) {
    ValidationReport rep;
    auto add = [&](const std::string& name, bool ok, double measured, const std::string& detail,
                   const std::string& code) {
        rep.checks.push_back({name, ok, measured, detail, code});
    };

    const double mg = geom.measure_g();
    const double my = geom.measure_y();
    add("phase_G_nonempty", mg > 0.0, mg, "|G| must be positive", "EmptyPhase");
    add("phase_Y_nonempty", my > 0.0, my, "|Y| must be positive", "EmptyPhase");

    bool inside = true;
    for (const auto& r : geom.g_regions) {
        if (r.kind == Region::Kind::box) {
            for (int i = 0; i < geom.dim; ++i)
                inside = inside && r.lo[i] >= 0.0 && r.hi[i] <= 1.0 && r.lo[i] < r.hi[i];
        } else {
            for (int i = 0; i < geom.dim; ++i)
                inside = inside && r.center[i] - r.radius >= 0.0 && r.center[i] + r.radius <= 1.0;
        }
    }
    add("regions_inside_cell", inside, inside ? 1.0 : 0.0,
        "G regions must lie inside the unit cell", "GeometryOutOfCell");

    double coff = 0.0;
    for (int i = 0; i < kern.dim; ++i) coff = std::max(coff, std::abs(kern.center[i]));
    add("kernel_symmetric", kern.symmetric(), coff, "a(-z) = a(z)", "AsymmetricKernel");
    add("kernel_nonnegative", kern.amplitude > 0.0, kern.amplitude, "a(z) >= 0", "NegativeKernel");

    const double l1 = kern.l1_norm();
    add("kernel_integrable", std::isfinite(l1) && l1 > 0.0, l1, "||a||_L1", "KernelNotIntegrable");
    const double m3 = kern.third_moment();
    add("kernel_third_moment", std::isfinite(m3), m3, "third absolute moment",
        "KernelMomentInfinite");
    double r0 = 0.0, c0 = 0.0;
    kern.lower_bound(r0, c0);
    add("kernel_lower_bound", c0 > 0.0 && r0 > 0.0, c0,
        "a(z) >= c on |z| <= r0, r0 = " + std::to_string(r0), "KernelNoLowerBound");

    const double a1 = w.alpha1();
    const double a2 = w.alpha2();
    add("contrast_lower_bound", a1 > 0.0, a1, "0 < alpha1 <= w", "UnboundedContrast");
    add("contrast_upper_bound", std::isfinite(a2) && a2 >= a1, a2, "w <= alpha2 < inf",
        "UnboundedContrast");
    add("contrast_symmetric", w.symmetric(), w.symmetric() ? 1.0 : 0.0, "w(xi,eta) = w(eta,xi)",
        "AsymmetricContrast");

    if (grid) {
        const double diff = std::abs(grid->measure_y_grid() - my);
        const double tol = 8.0 * geom.dim / grid->n + 1e-12;
        add("grid_measure_consistency", diff <= tol, diff,
            "grid Y measure vs analytic, tol = " + std::to_string(tol), "GridMeasureMismatch");
        add("grid_nonempty_phases", grid->y_count() > 0 && grid->g_count() > 0,
            static_cast<double>(std::min(grid->y_count(), grid->g_count())),
            "both phases must contain grid cells", "EmptyPhase");
    }
    return rep;
}

void ensure_valid(const ValidationReport& report) {
    const ValidationCheck* f = report.first_failure();
    if (!f) return;
    std::ostringstream msg;
    msg << f->name << ": " << f->detail << " (measured " << f->measured << ")";
    if (f->error_code == "EmptyPhase") throw EmptyPhase(msg.str());
    if (f->error_code == "AsymmetricKernel") throw AsymmetricKernel(msg.str());
    if (f->error_code == "UnboundedContrast") throw UnboundedContrast(msg.str());
    if (f->error_code == "AsymmetricContrast") throw AsymmetricContrast(msg.str());
    throw ValidationError(f->error_code, msg.str());
}

namespace {

// integer lattice spanned by winding vectors, kept in column-echelon form
class WindingLattice {
public:
    explicit WindingLattice(int dim) : dim_(dim) { pivots_.assign(dim, {}); }

    void insert(std::array<long long, kMaxDim> v) {
        for (int a = 0; a < dim_; ++a) {
            if (is_zero(v)) return;
            if (v[a] == 0) continue;
            if (!has_[a]) {
                pivots_[a] = v;
                has_[a] = true;
                return;
            }
            // gcd-combine so the pivot keeps the smallest leading entry
            auto& p = pivots_[a];
            while (v[a] != 0) {
                const long long q = p[a] / v[a];
                for (int k = 0; k < dim_; ++k) p[k] -= q * v[k];
                std::swap(p, v);
            }
        }
    }

    int rank() const {
        int r = 0;
        for (int a = 0; a < dim_; ++a) r += has_[a] ? 1 : 0;
        return r;
    }
    long long det() const {
        long long d = 1;
        for (int a = 0; a < dim_; ++a) {
            if (!has_[a]) return 0;
            d *= pivots_[a][a];
        }
        return std::llabs(d);
    }
    bool full() const { return rank() == dim_ && det() == 1; }
    std::vector<std::array<long long, kMaxDim>> basis() const {
        std::vector<std::array<long long, kMaxDim>> b;
        for (int a = 0; a < dim_; ++a)
            if (has_[a]) b.push_back(pivots_[a]);
        return b;
    }

private:
    bool is_zero(const std::array<long long, kMaxDim>& v) const {
        for (int k = 0; k < dim_; ++k)
            if (v[k] != 0) return false;
        return true;
    }
    int dim_;
    std::vector<std::array<long long, kMaxDim>> pivots_;
    std::array<bool, kMaxDim> has_{};
};

// union-find with winding potentials relative to component roots
class WindingDsu {
public:
    explicit WindingDsu(std::size_t n, int dim) : dim_(dim), parent_(n), rank_(n, 0), pot_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
        for (auto& p : pot_) p.fill(0);
        components_ = n;
    }

    std::size_t find(std::size_t x, std::array<long long, kMaxDim>& pot) {
        pot.fill(0);
        std::size_t root = x;
        while (parent_[root] != root) {
            for (int k = 0; k < dim_; ++k) pot[k] += pot_[root][k];
            root = parent_[root];
        }
        // path compression with potential accumulation
        std::size_t cur = x;
        std::array<long long, kMaxDim> acc{};
        acc.fill(0);
        while (parent_[cur] != root) {
            const std::size_t next = parent_[cur];
            std::array<long long, kMaxDim> save = pot_[cur];
            for (int k = 0; k < dim_; ++k) pot_[cur][k] = pot[k] - acc[k];
            parent_[cur] = root;
            for (int k = 0; k < dim_; ++k) acc[k] += save[k];
            cur = next;
        }
        return root;
    }

    // edge: copy of j shifted by w touches copy 0 of i; returns cycle vector when closed
    bool add_edge(std::size_t i, std::size_t j, const std::array<long long, kMaxDim>& w,
                  std::array<long long, kMaxDim>& cycle) {
        std::array<long long, kMaxDim> pi{}, pj{};
        const std::size_t ri = find(i, pi);
        const std::size_t rj = find(j, pj);
        if (ri == rj) {
            for (int k = 0; k < dim_; ++k) cycle[k] = pi[k] + w[k] - pj[k];
            return true;
        }
        std::array<long long, kMaxDim> off{};
        for (int k = 0; k < dim_; ++k) off[k] = pi[k] + w[k] - pj[k];
        if (rank_[ri] < rank_[rj]) {
            parent_[ri] = rj;
            for (int k = 0; k < dim_; ++k) pot_[ri][k] = -off[k];
        } else {
            parent_[rj] = ri;
            for (int k = 0; k < dim_; ++k) pot_[rj][k] = off[k];
            if (rank_[ri] == rank_[rj]) ++rank_[ri];
        }
        --components_;
        return false;
    }

    std::size_t components() const { return components_; }
    std::size_t root_of(std::size_t x) {
        std::array<long long, kMaxDim> dummy{};
        return find(x, dummy);
    }

private:
    int dim_;
    std::vector<std::size_t> parent_;
    std::vector<int> rank_;
    std::vector<std::array<long long, kMaxDim>> pot_;
    std::size_t components_ = 0;
};

} // namespace

std::string ConnectivityReport::summary() const {
    std::ostringstream os;
    os << (connected ? "connected" : "disconnected") << " (quotient "
       << (quotient_connected ? "connected" : "split") << ", winding rank " << winding_rank
       << ", det " << basis_det << ")";
    return os.str();
}

ConnectivityReport check_connectivity(const CellGeometry& geom, const Kernel& kern,
                                      const GridDiscretization& grid) {
    (void)geom;
    ConnectivityReport rep;
    const std::size_t ny = grid.y_count();
    if (ny == 0) throw EmptyPhase("no Y cells on the grid");
    WindingDsu dsu(ny, grid.dim);
    WindingLattice lattice(grid.dim);

    const double R = kern.support_radius_inf();
    const int reach = static_cast<int>(std::ceil(R / grid.h)) + 1;
    int ic[kMaxDim], tc[kMaxDim], wrapped[kMaxDim];
    const int n = grid.n;

    for (std::size_t yi = 0; yi < ny; ++yi) {
        const std::size_t ci = grid.y_cells[yi];
        grid.decode(ci, ic);

        int span = 1;
        for (int k = 0; k < grid.dim; ++k) span *= 2 * reach + 1;
        for (int t = 0; t < span; ++t) {
            int rem = t;
            bool self = true;
            std::array<long long, kMaxDim> wind{};
            for (int k = 0; k < grid.dim; ++k) {
                const int off = rem % (2 * reach + 1) - reach;
                rem /= (2 * reach + 1);
                tc[k] = ic[k] + off;
                self = self && off == 0;
                int m = tc[k] % n;
                if (m < 0) m += n;
                wrapped[k] = m;
                wind[k] = (tc[k] - m) / n;
            }
            if (self) continue;
            const std::size_t cj = grid.encode(wrapped);
            if (grid.is_g[cj]) continue;
            Point diff{};
            for (int k = 0; k < grid.dim; ++k) diff[k] = (tc[k] - ic[k]) * grid.h;
            if (kern.value(diff) <= 0.0) continue;

            const std::size_t yj = static_cast<std::size_t>(grid.compact[cj]);
            std::array<long long, kMaxDim> cycle{};
            if (dsu.add_edge(yi, yj, wind, cycle)) lattice.insert(cycle);
        }
        if (dsu.components() == 1 && lattice.full()) break; // nothing more can change
    }

    rep.quotient_connected = dsu.components() == 1;
    rep.winding_rank = lattice.rank();
    rep.basis_det = lattice.det();
    rep.winding_basis = lattice.basis();
    rep.connected = rep.quotient_connected && lattice.full();
    if (!rep.quotient_connected) {
        const std::size_t r0 = dsu.root_of(0);
        rep.witness_a = grid.y_cells[0];
        for (std::size_t yi = 1; yi < ny; ++yi) {
            if (dsu.root_of(yi) != r0) {
                rep.witness_b = grid.y_cells[yi];
                break;
            }
        }
    }
    return rep;
}

EffectiveRates rate_fields(const CellGeometry& geom, const Kernel& kern, const ContrastField& w,
                           const GridDiscretization& grid, const FoldedKernel& folded) {
    (void)geom;
    EffectiveRates r;
    const std::size_t ng = grid.g_count();
    const std::size_t ny = grid.y_count();
    const double hw = grid.cell_weight;
    const double y_meas = grid.measure_y_grid();

    r.btilde.resize(ng);
    r.ctilde.resize(ng);
    r.phi_mult.resize(ng);
    r.g_row_mass.resize(ng);
    r.p_y.resize(ny);

    // precompute integer coords
    std::vector<std::array<int, kMaxDim>> coords(grid.total);
    for (std::size_t c = 0; c < grid.total; ++c) {
        int idx[kMaxDim];
        grid.decode(c, idx);
        for (int k = 0; k < grid.dim; ++k) coords[c][k] = idx[k];
    }
    auto atab = [&](std::size_t ca, std::size_t cb) {
        int d[kMaxDim];
        for (int k = 0; k < grid.dim; ++k) d[k] = coords[ca][k] - coords[cb][k];
        return folded.table[grid.offset_of(d)];
    };

    Point xi{}, eta{};
    std::vector<double> fold_mass(ng, 0.0);
    for (std::size_t gi = 0; gi < ng; ++gi) {
        const std::size_t cg = grid.g_cells[gi];
        grid.center(cg, xi);
        double bsum = 0.0, csum = 0.0;
        for (std::size_t yj = 0; yj < ny; ++yj) {
            const std::size_t cy = grid.y_cells[yj];
            const double a = atab(cg, cy);
            if (a == 0.0) continue;
            grid.center(cy, eta);
            bsum += a * w(eta, xi);
            csum += a * w(xi, eta);
        }
        r.btilde[gi] = bsum * hw / y_meas;
        r.ctilde[gi] = csum * hw;

        double gmass = 0.0;
        for (std::size_t gj = 0; gj < ng; ++gj) {
            const std::size_t cg2 = grid.g_cells[gj];
            const double a = atab(cg, cg2);
            if (a == 0.0) continue;
            grid.center(cg2, eta);
            gmass += a * w(xi, eta);
        }
        r.g_row_mass[gi] = gmass * hw;

        double phisum = 0.0, mass = 0.0;
        for (std::size_t c = 0; c < grid.total; ++c) {
            const double a = atab(cg, c);
            if (a == 0.0) continue;
            mass += a;
            grid.center(c, eta);
            phisum += a * w(xi, eta);
        }
        r.phi_mult[gi] = phisum * hw;
        fold_mass[gi] = mass * hw;
    }

    for (std::size_t yi = 0; yi < ny; ++yi) {
        const std::size_t cy = grid.y_cells[yi];
        double s = 0.0;
        for (std::size_t yj = 0; yj < ny; ++yj) s += atab(cy, grid.y_cells[yj]);
        r.p_y[yi] = s * hw;
    }

    r.lambda0 = r.btilde.sum() * hw;
    const double l1 = kern.l1_norm();
    const double a1 = w.alpha1(), a2 = w.alpha2();
    r.gamma1 = a1 * l1;
    r.gamma2 = a2 * l1;
    r.b2 = a2 * l1 / y_meas;
    r.c2 = a2 * l1;
    // folded-kernel variant of the torus mass, per-row quadrature bounds
    const double fold_min = ng ? *std::min_element(fold_mass.begin(), fold_mass.end()) : 0.0;
    const double fold_max = ng ? *std::max_element(fold_mass.begin(), fold_mass.end()) : 0.0;
    r.gamma1_fold = a1 * fold_min;
    r.gamma2_fold = a2 * fold_max;
    return r;
}

Model build_model(const CellGeometry& geom, const Kernel& kern, const ContrastField& w, int n,
                  double fold_tol) {
    Model m;
    m.geometry = geom;
    m.kernel = kern;
    m.contrast = w;
    m.grid = GridDiscretization::build(geom, n);
    ensure_valid(validate_inputs(geom, kern, w, &m.grid));
    m.folded = fold_kernel(kern, m.grid, fold_tol);
    m.rates = rate_fields(geom, kern, w, m.grid, m.folded);
    return m;
}

} // namespace hcj
