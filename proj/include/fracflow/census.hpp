#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fracflow/operator.hpp"

namespace fracflow {

/// The four band sections of G', in d^ind order: 00 diagonal, 01 the +-1
/// bands, 10 the +-n bands, 11 the +-n^2 bands.
enum class Section : int { Diagonal = 0, BandZ = 1, BandY = 2, BandX = 3 };

inline Section section_of(Direction d) {
    switch (d) {
        case Direction::MinusZ:
        case Direction::PlusZ: return Section::BandZ;
        case Direction::MinusY:
        case Direction::PlusY: return Section::BandY;
        case Direction::MinusX:
        case Direction::PlusX: return Section::BandX;
    }
    return Section::Diagonal;
}

/// Census of the distinct values of the rescaled operator G', partitioned by
/// section and relabeled d = d^ind || d^val. Equal values in different
/// sections count as distinct. Value comparisons use exact double equality;
/// the assembly is deterministic, so equal formulas yield equal bits.
struct ValueCensus {
    GridSpec grid;
    double alpha = 0.0;  // subnormalization used to form G'

    std::int64_t F = 0;                    // distinct cell permeabilities
    std::vector<double> interface_values;  // sorted distinct face permeabilities

    std::int64_t D_init = 0;  // distinct nonzero values of G'
    std::int64_t D_prime = 0; // after section relabeling
    std::int64_t D = 0;       // padded, a power of two >= D_prime
    int val_width = 0;        // qubits of d^val, log2(D) - 2

    std::array<std::vector<double>, 4> section_values;  // sorted G' values per section

    /// Per-row value indices into section_values; -1 where the coupling is
    /// absent. Row a's lower z/y/x neighbors are a-1, a-n, a-n^2.
    std::vector<std::int32_t> diag_val;
    std::vector<std::int32_t> z_val, y_val, x_val;

    int section_count(Section s) const {
        return static_cast<int>(section_values[static_cast<int>(s)].size());
    }

    /// Packed label d = d^ind || d^val.
    int label(Section s, int v) const { return (static_cast<int>(s) << val_width) | v; }

    /// G' value for a packed label; padded labels have no value.
    double value_of_label(int d) const;
    bool label_is_assigned(int d) const;

    /// Value index (d^val) of the entry in row a toward direction dir, or -1
    /// if that entry is absent/zero. The diagonal is queried with
    /// `diag_value_index`.
    int value_index(std::int64_t a, Direction dir) const;
    int diag_value_index(std::int64_t a) const { return diag_val[static_cast<std::size_t>(a)]; }

    /// Packed label of entry (a, b), or -1 when G'_{a,b} is zero.
    int label_of_entry(std::int64_t a, std::int64_t b) const;
};

ValueCensus census(const CoefficientField& field, InterfaceRule rule,
                   const BoundaryMode& boundary);

}  // namespace fracflow
