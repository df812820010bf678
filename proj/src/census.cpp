#include "fracflow/census.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace fracflow {

namespace {

int index_of(const std::vector<double>& sorted, double v) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it == sorted.end() || *it != v) {
        throw std::logic_error("census: value missing from section table");
    }
    return static_cast<int>(it - sorted.begin());
}

int ceil_log2(std::int64_t x) {
    int w = 0;
    while ((std::int64_t{1} << w) < x) ++w;
    return w;
}

}  // namespace

double ValueCensus::value_of_label(int d) const {
    const int s = d >> val_width;
    const int v = d & ((1 << val_width) - 1);
    const auto& vals = section_values[s];
    if (v >= static_cast<int>(vals.size())) {
        throw std::domain_error("value_of_label: padded label has no value");
    }
    return vals[static_cast<std::size_t>(v)];
}

bool ValueCensus::label_is_assigned(int d) const {
    if (d < 0 || d >= D) return false;
    const int s = d >> val_width;
    const int v = d & ((1 << val_width) - 1);
    return v < static_cast<int>(section_values[s].size());
}

int ValueCensus::value_index(std::int64_t a, Direction dir) const {
    const std::int64_t n = grid.n;
    switch (dir) {
        case Direction::MinusZ: return z_val[static_cast<std::size_t>(a)];
        case Direction::MinusY: return y_val[static_cast<std::size_t>(a)];
        case Direction::MinusX: return x_val[static_cast<std::size_t>(a)];
        case Direction::PlusZ:
            return a + 1 < grid.N ? z_val[static_cast<std::size_t>(a + 1)] : -1;
        case Direction::PlusY:
            return a + n < grid.N ? y_val[static_cast<std::size_t>(a + n)] : -1;
        case Direction::PlusX:
            return a + n * n < grid.N ? x_val[static_cast<std::size_t>(a + n * n)] : -1;
    }
    return -1;
}

int ValueCensus::label_of_entry(std::int64_t a, std::int64_t b) const {
    if (a == b) {
        const int v = diag_value_index(a);
        return v < 0 ? -1 : label(Section::Diagonal, v);
    }
    const std::int64_t lo = std::min(a, b), hi = std::max(a, b);
    const std::int64_t off = hi - lo;
    Section s;
    std::int32_t v = -1;
    if (off == 1) {
        s = Section::BandZ;
        v = z_val[static_cast<std::size_t>(hi)];
    } else if (off == grid.n) {
        s = Section::BandY;
        v = y_val[static_cast<std::size_t>(hi)];
    } else if (off == grid.n * grid.n) {
        s = Section::BandX;
        v = x_val[static_cast<std::size_t>(hi)];
    } else {
        return -1;
    }
    return v < 0 ? -1 : label(s, v);
}

ValueCensus census(const CoefficientField& field, InterfaceRule rule,
                   const BoundaryMode& boundary) {
    const GridSpec& grid = field.grid;
    if (grid.ell < 1) {
        throw std::domain_error("census: need at least a 2x2x2 grid");
    }
    const double alpha = gershgorin_alpha(field, grid);
    const ScaledOperator scaled = rescale(assemble_G(field, grid, rule, boundary), alpha);
    const SparseOperator& op = scaled.op;

    ValueCensus c;
    c.grid = grid;
    c.alpha = alpha;

    c.F = field.distinct_count();
    {
        std::set<double> faces;
        for (std::int64_t a = 0; a < grid.N; ++a) {
            const double ka = field.cell_k[static_cast<std::size_t>(a)];
            for (const NeighborEntry& nb : neighbors(a, grid.n)) {
                const double kb =
                    nb.index ? field.cell_k[static_cast<std::size_t>(*nb.index)] : ka;
                faces.insert(interface_value(ka, kb, rule));
            }
        }
        c.interface_values.assign(faces.begin(), faces.end());
    }

    std::set<double> diag_set(op.diag.begin(), op.diag.end());
    std::set<double> z_set, y_set, x_set;
    for (double v : op.band_z)
        if (v != 0.0) z_set.insert(v);
    for (double v : op.band_y)
        if (v != 0.0) y_set.insert(v);
    for (double v : op.band_x)
        if (v != 0.0) x_set.insert(v);
    diag_set.erase(0.0);

    c.section_values[0].assign(diag_set.begin(), diag_set.end());
    c.section_values[1].assign(z_set.begin(), z_set.end());
    c.section_values[2].assign(y_set.begin(), y_set.end());
    c.section_values[3].assign(x_set.begin(), x_set.end());

    std::set<double> all_values(diag_set.begin(), diag_set.end());
    all_values.insert(z_set.begin(), z_set.end());
    all_values.insert(y_set.begin(), y_set.end());
    all_values.insert(x_set.begin(), x_set.end());
    c.D_init = static_cast<std::int64_t>(all_values.size());

    std::int64_t max_count = 1;
    c.D_prime = 0;
    for (const auto& vals : c.section_values) {
        c.D_prime += static_cast<std::int64_t>(vals.size());
        max_count = std::max(max_count, static_cast<std::int64_t>(vals.size()));
    }
    // Each section's values must fit in the d^val quadrant of the code space,
    // so the padded D is 4 * 2^ceil(log2(max section count)). On balanced
    // counts this equals 2^ceil(log2(D')).
    c.val_width = ceil_log2(max_count);
    c.D = std::int64_t{4} << c.val_width;

    c.diag_val.assign(static_cast<std::size_t>(grid.N), -1);
    c.z_val.assign(static_cast<std::size_t>(grid.N), -1);
    c.y_val.assign(static_cast<std::size_t>(grid.N), -1);
    c.x_val.assign(static_cast<std::size_t>(grid.N), -1);
    for (std::int64_t a = 0; a < grid.N; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        if (op.diag[ua] != 0.0) c.diag_val[ua] = index_of(c.section_values[0], op.diag[ua]);
        if (op.band_z[ua] != 0.0) c.z_val[ua] = index_of(c.section_values[1], op.band_z[ua]);
        if (op.band_y[ua] != 0.0) c.y_val[ua] = index_of(c.section_values[2], op.band_y[ua]);
        if (op.band_x[ua] != 0.0) c.x_val[ua] = index_of(c.section_values[3], op.band_x[ua]);
    }
    return c;
}

}  // namespace fracflow
