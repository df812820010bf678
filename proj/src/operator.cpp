#include "fracflow/operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fracflow/random.hpp"

namespace fracflow {

double SparseOperator::entry(std::int64_t a, std::int64_t b) const {
    if (a < 0 || b < 0 || a >= N || b >= N) {
        throw std::domain_error("SparseOperator::entry: index out of range");
    }
    if (a < b) std::swap(a, b);  // symmetric
    const std::int64_t off = a - b;
    if (off == 0) return diag[static_cast<std::size_t>(a)];
    if (off == 1) return band_z[static_cast<std::size_t>(a)];
    if (off == n) return band_y[static_cast<std::size_t>(a)];
    if (off == n * n) return band_x[static_cast<std::size_t>(a)];
    return 0.0;
}

double SparseOperator::entry_in_direction(std::int64_t a, Direction d) const {
    const std::int64_t b = a + direction_offset(d, n);
    if (b < 0 || b >= N) return 0.0;
    return entry(a, b);
}

void SparseOperator::matvec(const double* x, double* y) const {
    const std::int64_t nn = n * n;
    for (std::int64_t a = 0; a < N; ++a) {
        double acc = diag[static_cast<std::size_t>(a)] * x[a];
        if (band_z[static_cast<std::size_t>(a)] != 0.0)
            acc += band_z[static_cast<std::size_t>(a)] * x[a - 1];
        if (a + 1 < N && band_z[static_cast<std::size_t>(a + 1)] != 0.0)
            acc += band_z[static_cast<std::size_t>(a + 1)] * x[a + 1];
        if (band_y[static_cast<std::size_t>(a)] != 0.0)
            acc += band_y[static_cast<std::size_t>(a)] * x[a - n];
        if (a + n < N && band_y[static_cast<std::size_t>(a + n)] != 0.0)
            acc += band_y[static_cast<std::size_t>(a + n)] * x[a + n];
        if (band_x[static_cast<std::size_t>(a)] != 0.0)
            acc += band_x[static_cast<std::size_t>(a)] * x[a - nn];
        if (a + nn < N && band_x[static_cast<std::size_t>(a + nn)] != 0.0)
            acc += band_x[static_cast<std::size_t>(a + nn)] * x[a + nn];
        y[a] = acc;
    }
}

std::vector<double> SparseOperator::apply(const std::vector<double>& x) const {
    if (static_cast<std::int64_t>(x.size()) != N) {
        throw std::domain_error("SparseOperator::apply: dimension mismatch");
    }
    std::vector<double> y(x.size());
    matvec(x.data(), y.data());
    return y;
}

std::int64_t SparseOperator::stored_nonzeros() const {
    std::int64_t count = 0;
    for (double v : diag)
        if (v != 0.0) ++count;
    for (double v : band_z)
        if (v != 0.0) ++count;
    for (double v : band_y)
        if (v != 0.0) ++count;
    for (double v : band_x)
        if (v != 0.0) ++count;
    return count;
}

namespace {

SparseOperator empty_operator(const GridSpec& grid) {
    SparseOperator op;
    op.n = grid.n;
    op.N = grid.N;
    op.diag.assign(static_cast<std::size_t>(grid.N), 0.0);
    op.band_z.assign(static_cast<std::size_t>(grid.N), 0.0);
    op.band_y.assign(static_cast<std::size_t>(grid.N), 0.0);
    op.band_x.assign(static_cast<std::size_t>(grid.N), 0.0);
    return op;
}

}  // namespace

SparseOperator assemble_G(const CoefficientField& field, const GridSpec& grid,
                          InterfaceRule rule, const BoundaryMode& boundary) {
    if (static_cast<std::int64_t>(field.cell_k.size()) != grid.N || field.grid.N != grid.N) {
        throw std::domain_error("assemble_G: field does not match the grid");
    }
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    SparseOperator op = empty_operator(grid);

    for (std::int64_t a = 0; a < grid.N; ++a) {
        const double ka = field.cell_k[static_cast<std::size_t>(a)];
        double diag_sum = 0.0;
        for (const NeighborEntry& nb : neighbors(a, grid.n)) {
            // ghost cells mirror the boundary cell's permeability, so a
            // boundary face contributes k_a and no off-diagonal entry
            const double kb = nb.index ? field.cell_k[static_cast<std::size_t>(*nb.index)] : ka;
            const double k_face = interface_value(ka, kb, rule);
            diag_sum += k_face;
            if (nb.index && *nb.index < a) {
                const double v = -k_face * inv_dx2;
                switch (nb.dir) {
                    case Direction::MinusZ: op.band_z[static_cast<std::size_t>(a)] = v; break;
                    case Direction::MinusY: op.band_y[static_cast<std::size_t>(a)] = v; break;
                    case Direction::MinusX: op.band_x[static_cast<std::size_t>(a)] = v; break;
                    default: break;
                }
            }
        }
        op.diag[static_cast<std::size_t>(a)] = diag_sum * inv_dx2;
    }

    if (boundary.kind == BoundaryKind::IdentityRows) {
        for (std::int64_t r : boundary.identity_cells) {
            if (r < 0 || r >= grid.N) {
                throw std::domain_error("assemble_G: identity row out of range");
            }
            op.diag[static_cast<std::size_t>(r)] = 1.0;
            op.band_z[static_cast<std::size_t>(r)] = 0.0;
            op.band_y[static_cast<std::size_t>(r)] = 0.0;
            op.band_x[static_cast<std::size_t>(r)] = 0.0;
            if (r + 1 < grid.N) op.band_z[static_cast<std::size_t>(r + 1)] = 0.0;
            if (r + grid.n < grid.N) op.band_y[static_cast<std::size_t>(r + grid.n)] = 0.0;
            if (r + grid.n * grid.n < grid.N)
                op.band_x[static_cast<std::size_t>(r + grid.n * grid.n)] = 0.0;
        }
    }
    return op;
}

SparseOperator laplacian3d(const GridSpec& grid) {
    SparseOperator op = empty_operator(grid);
    for (std::int64_t a = 0; a < grid.N; ++a) {
        op.diag[static_cast<std::size_t>(a)] = 6.0;
        for (const NeighborEntry& nb : neighbors(a, grid.n)) {
            if (!nb.index || *nb.index > a) continue;
            switch (nb.dir) {
                case Direction::MinusZ: op.band_z[static_cast<std::size_t>(a)] = -1.0; break;
                case Direction::MinusY: op.band_y[static_cast<std::size_t>(a)] = -1.0; break;
                case Direction::MinusX: op.band_x[static_cast<std::size_t>(a)] = -1.0; break;
                default: break;
            }
        }
    }
    return op;
}

double gershgorin_alpha(const CoefficientField& field, const GridSpec& grid) {
    const double n2 = static_cast<double>(grid.n) * static_cast<double>(grid.n);
    return 12.0 * field.k_max() * n2 / (grid.L * grid.L);
}

ScaledOperator rescale(const SparseOperator& G, double alpha) {
    if (!(alpha > 0.0)) {
        throw std::domain_error("rescale: subnormalization must be positive");
    }
    ScaledOperator scaled;
    scaled.alpha = alpha;
    scaled.op = G;
    for (double& v : scaled.op.diag) v /= alpha;
    for (double& v : scaled.op.band_z) v /= alpha;
    for (double& v : scaled.op.band_y) v /= alpha;
    for (double& v : scaled.op.band_x) v /= alpha;

    // row-sum bound on the spectral norm; the power-iteration check lives in
    // the test suites
    double max_row_sum = 0.0;
    const SparseOperator& op = scaled.op;
    for (std::int64_t a = 0; a < op.N; ++a) {
        double row = std::abs(op.diag[static_cast<std::size_t>(a)]);
        for (Direction d : kDirections) row += std::abs(op.entry_in_direction(a, d));
        max_row_sum = std::max(max_row_sum, row);
    }
    if (max_row_sum > 1.0 + 1e-9) {
        throw std::runtime_error("rescale: ||G'|| bound exceeded, row sum " +
                                 std::to_string(max_row_sum));
    }
    return scaled;
}

std::vector<double> build_source(const GridSpec& grid,
                                 const std::vector<std::pair<std::int64_t, double>>& sites) {
    std::vector<double> b(static_cast<std::size_t>(grid.N), 0.0);
    std::set<std::int64_t> seen;
    for (const auto& [cell, amplitude] : sites) {
        if (cell < 0 || cell >= grid.N) {
            throw std::domain_error("build_source: site out of range");
        }
        if (!seen.insert(cell).second) {
            throw std::domain_error("build_source: duplicate site " + std::to_string(cell));
        }
        b[static_cast<std::size_t>(cell)] = amplitude;
    }
    return b;
}

std::vector<double> random_source(const GridSpec& grid, int count, std::uint64_t seed) {
    if (count < 1 || count > grid.N) {
        throw std::domain_error("random_source: site count out of range");
    }
    SplitMix64 rng(seed);
    std::set<std::int64_t> cells;
    while (static_cast<int>(cells.size()) < count) {
        cells.insert(static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(grid.N))));
    }
    std::vector<std::pair<std::int64_t, double>> sites;
    sites.reserve(cells.size());
    double sign = 1.0;
    for (std::int64_t c : cells) {
        sites.emplace_back(c, sign);
        sign = -sign;
    }
    return build_source(grid, sites);
}

void write_matrix_market(const SparseOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << op.N << " " << op.N << " " << op.stored_nonzeros() << "\n";
    char buf[96];
    auto emit = [&](std::int64_t a, std::int64_t b, double v) {
        std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n", static_cast<long long>(a + 1),
                      static_cast<long long>(b + 1), v);
        out << buf;
    };
    const std::int64_t nn = op.n * op.n;
    for (std::int64_t a = 0; a < op.N; ++a) {
        if (op.band_x[static_cast<std::size_t>(a)] != 0.0)
            emit(a, a - nn, op.band_x[static_cast<std::size_t>(a)]);
        if (op.band_y[static_cast<std::size_t>(a)] != 0.0)
            emit(a, a - op.n, op.band_y[static_cast<std::size_t>(a)]);
        if (op.band_z[static_cast<std::size_t>(a)] != 0.0)
            emit(a, a - 1, op.band_z[static_cast<std::size_t>(a)]);
        if (op.diag[static_cast<std::size_t>(a)] != 0.0)
            emit(a, a, op.diag[static_cast<std::size_t>(a)]);
    }
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::int64_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SparseOperator read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::int64_t lineno = 0;

    if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string banner, object, format, valtype, symmetry;
        hs >> banner >> object >> format >> valtype >> symmetry;
        if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" ||
            valtype != "real" || symmetry != "symmetric") {
            parse_fail(path, lineno, "expected '%%MatrixMarket matrix coordinate real symmetric'");
        }
    }
    std::int64_t rows = 0, cols = 0, nnz = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        std::istringstream ds(line);
        if (!(ds >> rows >> cols >> nnz)) parse_fail(path, lineno, "bad size line");
        break;
    }
    if (rows <= 0 || rows != cols) parse_fail(path, lineno, "matrix must be square");
    const std::int64_t n = std::llround(std::cbrt(static_cast<double>(rows)));
    if (n * n * n != rows) parse_fail(path, lineno, "dimension is not a cube");

    SparseOperator op;
    op.n = n;
    op.N = rows;
    op.diag.assign(static_cast<std::size_t>(rows), 0.0);
    op.band_z.assign(static_cast<std::size_t>(rows), 0.0);
    op.band_y.assign(static_cast<std::size_t>(rows), 0.0);
    op.band_x.assign(static_cast<std::size_t>(rows), 0.0);

    std::int64_t seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream es(line);
        std::int64_t a1 = 0, b1 = 0;
        double v = 0.0;
        if (!(es >> a1 >> b1 >> v)) parse_fail(path, lineno, "bad entry line");
        std::int64_t a = a1 - 1, b = b1 - 1;
        if (a < 0 || b < 0 || a >= rows || b >= rows) parse_fail(path, lineno, "index out of range");
        if (a < b) std::swap(a, b);
        const std::int64_t off = a - b;
        if (off == 0)
            op.diag[static_cast<std::size_t>(a)] = v;
        else if (off == 1)
            op.band_z[static_cast<std::size_t>(a)] = v;
        else if (off == n)
            op.band_y[static_cast<std::size_t>(a)] = v;
        else if (off == n * n)
            op.band_x[static_cast<std::size_t>(a)] = v;
        else
            parse_fail(path, lineno, "entry outside the seven-band structure");
        ++seen;
    }
    if (seen != nnz) {
        parse_fail(path, lineno, "entry count " + std::to_string(seen) + " does not match header " +
                                     std::to_string(nnz));
    }
    return op;
}

void write_vector_csv(const std::vector<double>& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    char buf[64];
    for (double x : v) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", x);
        out << buf;
    }
}

std::vector<double> read_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> v;
    double x = 0.0;
    while (in >> x) v.push_back(x);
    return v;
}

}  // namespace fracflow
