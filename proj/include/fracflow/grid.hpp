#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace fracflow {

/// Cubic grid with n = 2^ell cells per axis on a physical cube of side L.
/// Cells are linearized row-by-row: a = k + j*n + i*n^2, so consecutive
/// indices walk the z axis first, then y, then x.
struct GridSpec {
    int ell = 0;          // refinement level
    std::int64_t n = 1;   // cells per axis, n = 2^ell
    std::int64_t N = 1;   // total cells, n^3
    double L = 1.0;       // physical side length
    double dx = 1.0;      // cell size, L/n

    static GridSpec from_level(int ell, double L);
};

struct CellCoords {
    std::int64_t i = 0;
    std::int64_t j = 0;
    std::int64_t k = 0;
};

/// Face directions in the fixed order shared by every module
/// (matches the row order of the seven-band operator).
enum class Direction : int {
    MinusX = 0,
    MinusY = 1,
    MinusZ = 2,
    PlusZ = 3,
    PlusY = 4,
    PlusX = 5,
};

constexpr std::array<Direction, 6> kDirections = {
    Direction::MinusX, Direction::MinusY, Direction::MinusZ,
    Direction::PlusZ,  Direction::PlusY,  Direction::PlusX,
};

Direction opposite(Direction d);

/// Linear index offset of a direction for a grid with n cells per axis
/// (+-1 for z, +-n for y, +-n^2 for x).
std::int64_t direction_offset(Direction d, std::int64_t n);

std::int64_t linear_index(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t n);

CellCoords grid_coords(std::int64_t a, std::int64_t n);

struct NeighborEntry {
    Direction dir;
    std::optional<std::int64_t> index;  // empty means out of domain
};

/// All six face neighbors of cell a, in kDirections order. Neighbors across
/// the domain boundary are reported as out-of-domain, never wrapped.
std::array<NeighborEntry, 6> neighbors(std::int64_t a, std::int64_t n);

/// The eight child cells covering cell (i,j,k) after one grid doubling,
/// as sorted linear indices in the (2n)^3 grid.
std::array<std::int64_t, 8> refine_indices(std::int64_t i, std::int64_t j, std::int64_t k,
                                           int ell);

}  // namespace fracflow
