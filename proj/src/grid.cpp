#include "fracflow/grid.hpp"

#include <stdexcept>
#include <string>

namespace fracflow {

GridSpec GridSpec::from_level(int ell, double L) {
    if (ell < 0 || ell > 20) {
        throw std::domain_error("GridSpec: refinement level must be in [0, 20], got " +
                                std::to_string(ell));
    }
    if (!(L > 0.0)) {
        throw std::domain_error("GridSpec: physical side length must be positive");
    }
    GridSpec g;
    g.ell = ell;
    g.n = std::int64_t{1} << ell;
    g.N = g.n * g.n * g.n;
    g.L = L;
    g.dx = L / static_cast<double>(g.n);
    return g;
}

Direction opposite(Direction d) {
    switch (d) {
        case Direction::MinusX: return Direction::PlusX;
        case Direction::MinusY: return Direction::PlusY;
        case Direction::MinusZ: return Direction::PlusZ;
        case Direction::PlusZ: return Direction::MinusZ;
        case Direction::PlusY: return Direction::MinusY;
        case Direction::PlusX: return Direction::MinusX;
    }
    throw std::logic_error("opposite: bad direction");
}

std::int64_t direction_offset(Direction d, std::int64_t n) {
    switch (d) {
        case Direction::MinusX: return -n * n;
        case Direction::MinusY: return -n;
        case Direction::MinusZ: return -1;
        case Direction::PlusZ: return 1;
        case Direction::PlusY: return n;
        case Direction::PlusX: return n * n;
    }
    throw std::logic_error("direction_offset: bad direction");
}

std::int64_t linear_index(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t n) {
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) {
        throw std::domain_error("linear_index: cell (" + std::to_string(i) + "," +
                                std::to_string(j) + "," + std::to_string(k) +
                                ") out of range for n=" + std::to_string(n));
    }
    return k + j * n + i * n * n;
}

CellCoords grid_coords(std::int64_t a, std::int64_t n) {
    if (a < 0 || a >= n * n * n) {
        throw std::domain_error("grid_coords: index " + std::to_string(a) +
                                " out of range for n=" + std::to_string(n));
    }
    CellCoords c;
    c.k = a % n;
    c.j = (a / n) % n;
    c.i = a / (n * n);
    return c;
}

std::array<NeighborEntry, 6> neighbors(std::int64_t a, std::int64_t n) {
    const CellCoords c = grid_coords(a, n);
    std::array<NeighborEntry, 6> out;
    for (std::size_t idx = 0; idx < kDirections.size(); ++idx) {
        const Direction d = kDirections[idx];
        CellCoords nb = c;
        switch (d) {
            case Direction::MinusX: nb.i -= 1; break;
            case Direction::MinusY: nb.j -= 1; break;
            case Direction::MinusZ: nb.k -= 1; break;
            case Direction::PlusZ: nb.k += 1; break;
            case Direction::PlusY: nb.j += 1; break;
            case Direction::PlusX: nb.i += 1; break;
        }
        const bool inside = nb.i >= 0 && nb.i < n && nb.j >= 0 && nb.j < n && nb.k >= 0 && nb.k < n;
        out[idx].dir = d;
        if (inside) {
            out[idx].index = a + direction_offset(d, n);
        } else {
            out[idx].index = std::nullopt;
        }
    }
    return out;
}

std::array<std::int64_t, 8> refine_indices(std::int64_t i, std::int64_t j, std::int64_t k,
                                           int ell) {
    const std::int64_t n = std::int64_t{1} << ell;
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) {
        throw std::domain_error("refine_indices: cell out of range for ell=" +
                                std::to_string(ell));
    }
    const std::int64_t two_n = 2 * n;
    const std::int64_t r = 2 * k + two_n * (2 * j + two_n * 2 * i);
    std::array<std::int64_t, 8> out = {
        r,
        r + 1,
        r + two_n,
        r + two_n + 1,
        r + 4 * n * n,
        r + 4 * n * n + 1,
        r + 4 * n * n + two_n,
        r + 4 * n * n + two_n + 1,
    };
    return out;  // already ascending
}

}  // namespace fracflow
