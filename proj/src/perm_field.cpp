#include "fracflow/perm_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace fracflow {

double CoefficientField::k_min() const {
    return *std::min_element(cell_k.begin(), cell_k.end());
}

double CoefficientField::k_max() const {
    return *std::max_element(cell_k.begin(), cell_k.end());
}

std::int64_t CoefficientField::distinct_count() const {
    std::set<double> values(cell_k.begin(), cell_k.end());
    return static_cast<std::int64_t>(values.size());
}

namespace {

// Generation-time view of a fracture: a 1-cell-thick segment in the XY plane
// with a z extent. axis 0 runs along x, axis 1 along y.
struct Segment {
    int axis;
    std::int64_t u0, u1;   // span along axis, inclusive
    std::int64_t v;        // fixed transverse coordinate
    std::int64_t z0, z1;   // z extent, inclusive
};

Fracture to_box(const Segment& s, int scale, double perm, std::int64_t n) {
    Fracture f;
    f.scale = scale;
    f.permeability = perm;
    const std::int64_t clamp_lo = 0;
    const std::int64_t clamp_hi = n - 1;
    auto clip = [&](std::int64_t x) { return std::clamp(x, clamp_lo, clamp_hi); };
    if (s.axis == 0) {
        f.lo = {clip(s.u0), clip(s.v), clip(s.z0)};
        f.hi = {clip(s.u1), clip(s.v), clip(s.z1)};
    } else {
        f.lo = {clip(s.v), clip(s.u0), clip(s.z0)};
        f.hi = {clip(s.v), clip(s.u1), clip(s.z1)};
    }
    return f;
}

}  // namespace

FractureNetwork pitchfork3d(const GridSpec& grid, int num_scales, double beta,
                            double background) {
    if (num_scales < 1) {
        throw std::domain_error("pitchfork3d: need at least one fracture scale");
    }
    if ((std::int64_t{1} << num_scales) > grid.n) {
        throw std::domain_error("pitchfork3d: 2^F must not exceed the grid side (F=" +
                                std::to_string(num_scales) + ", n=" + std::to_string(grid.n) +
                                ")");
    }
    if (!(background > 0.0)) {
        throw std::domain_error("pitchfork3d: background permeability must be positive");
    }

    const std::int64_t n = grid.n;
    FractureNetwork net;
    net.num_scales = num_scales;
    net.beta = beta;
    net.background = background;

    auto scale_perm = [&](int s) { return std::pow(grid.L / std::pow(2.0, s), beta); };

    std::vector<Segment> parents;
    Segment trunk{0, 0, n - 1, n / 2, 0, n - 1};
    parents.push_back(trunk);
    net.fractures.push_back(to_box(trunk, 0, scale_perm(0), n));

    for (int s = 1; s < num_scales; ++s) {
        const std::int64_t len = n >> s;  // child length and z depth
        const double perm = scale_perm(s);
        std::vector<Segment> children;
        children.reserve(parents.size() * 3);
        for (const Segment& p : parents) {
            const std::int64_t zc0 = p.z0 + ((p.z1 - p.z0 + 1) - len) / 2;
            const std::int64_t zc1 = zc0 + len - 1;
            const int b = 1 - p.axis;
            const std::int64_t mid = p.u0 + (p.u1 - p.u0 + 1) / 2;
            // Two tines at the endpoints, pointing in opposite transverse
            // directions, plus a continuation tine at the center.
            children.push_back(Segment{b, p.v - len + 1, p.v, p.u0, zc0, zc1});
            children.push_back(Segment{b, p.v, p.v + len - 1, p.u1, zc0, zc1});
            children.push_back(Segment{b, p.v, p.v + len - 1, mid, zc0, zc1});
        }
        for (Segment& c : children) {
            c.u0 = std::clamp(c.u0, std::int64_t{0}, n - 1);
            c.u1 = std::clamp(c.u1, std::int64_t{0}, n - 1);
            c.v = std::clamp(c.v, std::int64_t{0}, n - 1);
            net.fractures.push_back(to_box(c, s, perm, n));
        }
        parents = std::move(children);
    }

    double min_perm = net.fractures.front().permeability;
    for (const Fracture& f : net.fractures) {
        min_perm = std::min(min_perm, f.permeability);
    }
    if (!(background < min_perm)) {
        throw std::domain_error(
            "pitchfork3d: background permeability must lie below every fracture value "
            "(background=" +
            std::to_string(background) + ", min fracture=" + std::to_string(min_perm) + ")");
    }
    return net;
}

CoefficientField rasterize(const FractureNetwork& network, const GridSpec& grid) {
    for (const Fracture& f : network.fractures) {
        if (f.lo[0] < 0 || f.lo[1] < 0 || f.lo[2] < 0 || f.hi[0] >= grid.n ||
            f.hi[1] >= grid.n || f.hi[2] >= grid.n) {
            throw std::domain_error("rasterize: fracture extent outside the grid");
        }
    }
    CoefficientField field;
    field.grid = grid;
    field.cell_k.assign(static_cast<std::size_t>(grid.N), network.background);
    for (const Fracture& f : network.fractures) {
        if (f.empty()) continue;
        for (std::int64_t i = f.lo[0]; i <= f.hi[0]; ++i) {
            for (std::int64_t j = f.lo[1]; j <= f.hi[1]; ++j) {
                for (std::int64_t k = f.lo[2]; k <= f.hi[2]; ++k) {
                    const std::int64_t a = linear_index(i, j, k, grid.n);
                    field.cell_k[static_cast<std::size_t>(a)] =
                        std::max(field.cell_k[static_cast<std::size_t>(a)], f.permeability);
                }
            }
        }
    }
    return field;
}

CoefficientField constant_field(const GridSpec& grid, double k) {
    if (!(k > 0.0)) {
        throw std::domain_error("constant_field: permeability must be positive");
    }
    CoefficientField field;
    field.grid = grid;
    field.cell_k.assign(static_cast<std::size_t>(grid.N), k);
    return field;
}

double interface_value(double ka, double kb, InterfaceRule rule) {
    if (!(ka > 0.0) || !(kb > 0.0)) {
        throw std::domain_error("interface_value: permeabilities must be positive");
    }
    switch (rule) {
        case InterfaceRule::Geometric: return std::sqrt(ka * kb);
        case InterfaceRule::Harmonic: return 2.0 * ka * kb / (ka + kb);
    }
    throw std::logic_error("interface_value: bad rule");
}

const char* to_string(InterfaceRule rule) {
    return rule == InterfaceRule::Geometric ? "geometric" : "harmonic";
}

InterfaceRule interface_rule_from_string(const std::string& s) {
    if (s == "geometric") return InterfaceRule::Geometric;
    if (s == "harmonic") return InterfaceRule::Harmonic;
    throw std::domain_error("unknown interface rule: " + s);
}

void write_field_csv(const CoefficientField& field, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
    char buf[64];
    for (double v : field.cell_k) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out << buf;
    }
}

void write_field_header_json(const CoefficientField& field, int num_scales, double beta,
                             double background, const std::string& json_path,
                             const std::string& csv_name) {
    nlohmann::json j;
    j["ell"] = field.grid.ell;
    j["L"] = field.grid.L;
    j["F"] = num_scales;
    j["beta"] = beta;
    j["k_bg"] = background;
    j["values_csv"] = csv_name;
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot open " + json_path + " for writing");
    out << j.dump(2) << "\n";
}

CoefficientField read_field_csv(const GridSpec& grid, const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open " + csv_path);
    CoefficientField field;
    field.grid = grid;
    field.cell_k.reserve(static_cast<std::size_t>(grid.N));
    double v = 0.0;
    while (in >> v) {
        field.cell_k.push_back(v);
    }
    if (static_cast<std::int64_t>(field.cell_k.size()) != grid.N) {
        throw std::runtime_error("field CSV " + csv_path + " holds " +
                                 std::to_string(field.cell_k.size()) + " values, expected " +
                                 std::to_string(grid.N));
    }
    for (double k : field.cell_k) {
        if (!(k > 0.0)) throw std::runtime_error("field CSV contains a nonpositive value");
    }
    return field;
}

}  // namespace fracflow
