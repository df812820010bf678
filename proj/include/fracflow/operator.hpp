#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracflow/grid.hpp"
#include "fracflow/perm_field.hpp"

namespace fracflow {

/// Symmetric seven-band operator on the cubic grid. Only the lower bands are
/// stored: band_z[a] holds entry (a, a-1), band_y[a] entry (a, a-n),
/// band_x[a] entry (a, a-n^2); absent couplings are zero.
struct SparseOperator {
    std::int64_t n = 0;  // cells per axis
    std::int64_t N = 0;
    std::vector<double> diag;
    std::vector<double> band_z;
    std::vector<double> band_y;
    std::vector<double> band_x;

    /// Entry (a, b); zero unless b is a or a face neighbor of a.
    double entry(std::int64_t a, std::int64_t b) const;
    /// Off-diagonal entry of row a in the given direction (zero at the
    /// domain boundary), or the diagonal when queried with row == column.
    double entry_in_direction(std::int64_t a, Direction d) const;

    void matvec(const double* x, double* y) const;
    std::vector<double> apply(const std::vector<double>& x) const;

    /// Stored lower-triangle nonzero count (diagonal included).
    std::int64_t stored_nonzeros() const;
};

enum class BoundaryKind { GhostDirichlet, IdentityRows };

struct BoundaryMode {
    BoundaryKind kind = BoundaryKind::GhostDirichlet;
    std::vector<std::int64_t> identity_cells;  // used by IdentityRows

    static BoundaryMode ghost_dirichlet() { return BoundaryMode{}; }
    static BoundaryMode identity_rows(std::vector<std::int64_t> cells) {
        return BoundaryMode{BoundaryKind::IdentityRows, std::move(cells)};
    }
};

/// Assemble the heterogeneous Poisson operator from a coefficient field.
/// GhostDirichlet keeps the six-face diagonal sum everywhere, mirroring the
/// boundary cell's permeability into ghost cells; IdentityRows additionally
/// replaces the listed rows by unit rows with symmetric column zeroing.
SparseOperator assemble_G(const CoefficientField& field, const GridSpec& grid,
                          InterfaceRule rule, const BoundaryMode& boundary);

/// Constant-coefficient stencil (diagonal 6, off-diagonals -1), without the
/// 1/dx^2 factor.
SparseOperator laplacian3d(const GridSpec& grid);

/// Gershgorin subnormalization 12 * k_max * N^(2/3) / L^2.
double gershgorin_alpha(const CoefficientField& field, const GridSpec& grid);

struct ScaledOperator {
    SparseOperator op;  // holds G' = G / alpha
    double alpha = 0.0;
    double a_max = 0.0;  // 12 * k_max / L^2
};

ScaledOperator rescale(const SparseOperator& G, double alpha);

/// Sparse source vector with the given support, or `random_source` for
/// `count` distinct sites with alternating +1/-1 amplitudes.
std::vector<double> build_source(const GridSpec& grid,
                                 const std::vector<std::pair<std::int64_t, double>>& sites);
std::vector<double> random_source(const GridSpec& grid, int count, std::uint64_t seed);

void write_matrix_market(const SparseOperator& op, const std::string& path);
SparseOperator read_matrix_market(const std::string& path);

void write_vector_csv(const std::vector<double>& v, const std::string& path);
std::vector<double> read_vector_csv(const std::string& path);

}  // namespace fracflow
