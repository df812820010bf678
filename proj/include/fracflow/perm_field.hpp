#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fracflow/grid.hpp"

namespace fracflow {

/// Axis-aligned box of cells occupied by one fracture, inclusive on both ends.
struct Fracture {
    int scale = 0;
    std::array<std::int64_t, 3> lo{0, 0, 0};  // (i, j, k)
    std::array<std::int64_t, 3> hi{0, 0, 0};
    double permeability = 0.0;

    bool covers(const CellCoords& c) const {
        return c.i >= lo[0] && c.i <= hi[0] && c.j >= lo[1] && c.j <= hi[1] && c.k >= lo[2] &&
               c.k <= hi[2];
    }
    bool empty() const { return hi[0] < lo[0] || hi[1] < lo[1] || hi[2] < lo[2]; }
};

struct FractureNetwork {
    std::vector<Fracture> fractures;
    int num_scales = 0;  // scales present are exactly 0..num_scales-1
    double beta = 0.0;
    double background = 0.0;  // matrix permeability, below every fracture value
};

struct CoefficientField {
    GridSpec grid;
    std::vector<double> cell_k;  // length grid.N, strictly positive

    double k_min() const;
    double k_max() const;
    /// Number of distinct cell values.
    std::int64_t distinct_count() const;
};

/// Deterministic 3D pitchfork fracture generator. Scale 0 is a slab spanning
/// the domain along x at mid-y, full z depth. Each parent spawns three
/// perpendicular children of half its length (tines at the two endpoints in
/// opposite transverse directions plus a centered continuation), with z depth
/// equal to their length, centered on the parent's z extent. Scale-s
/// permeability is (L/2^s)^beta. Child extents are clipped to the grid.
FractureNetwork pitchfork3d(const GridSpec& grid, int num_scales, double beta,
                            double background);

/// Paint the network onto the grid; overlaps resolve to the largest
/// permeability, uncovered cells carry the background value.
CoefficientField rasterize(const FractureNetwork& network, const GridSpec& grid);

CoefficientField constant_field(const GridSpec& grid, double k);

enum class InterfaceRule { Geometric, Harmonic };

double interface_value(double ka, double kb, InterfaceRule rule);

const char* to_string(InterfaceRule rule);
InterfaceRule interface_rule_from_string(const std::string& s);

/// Field exchange format: a CSV of N cell values plus a JSON header with
/// {ell, L, beta, F, k_bg}.
void write_field_csv(const CoefficientField& field, const std::string& csv_path);
void write_field_header_json(const CoefficientField& field, int num_scales, double beta,
                             double background, const std::string& json_path,
                             const std::string& csv_name);
CoefficientField read_field_csv(const GridSpec& grid, const std::string& csv_path);

}  // namespace fracflow
