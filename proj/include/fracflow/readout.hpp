#pragma once

#include <cstdint>
#include <vector>

#include "fracflow/circuit.hpp"
#include "fracflow/grid.hpp"

namespace fracflow {

/// Uniform-superposition observable over the refined image of one base cell.
/// The preparation circuit places the shifted bits of the base index with X
/// gates and opens the t new low bits of each axis field with Hadamards, so
/// each doubling costs exactly three qubits and three H gates.
struct RegionObservable {
    CellCoords base_cell;
    int base_level = 0;
    int target_level = 0;  // base_level + refinement steps
    Circuit prep_circuit;  // acts on 3 * target_level qubits
    std::vector<std::int64_t> support;  // sorted cell indices at the target level
    double amplitude = 1.0;             // 8^(-t/2)
};

RegionObservable region_state_prep(std::int64_t i, std::int64_t j, std::int64_t k, int ell,
                                   int t);

/// 8^(-t/2) * sum of x over the support; x lives on the target-level grid.
double exact_overlap(const RegionObservable& obs, const std::vector<double>& x);

/// Region average (1/8^t) * sum of x over the support.
double region_average(const RegionObservable& obs, const std::vector<double>& x);

struct HadamardTestResult {
    double estimate = 0.0;
    double std_err = 0.0;
    std::int64_t shots = 0;
};

/// Shot-sampled estimate of Re<phi|x> for a normalized x, with
/// P(outcome 0) = (1 + Re<phi|x>)/2. Deterministic under seed.
HadamardTestResult hadamard_test_estimate(const RegionObservable& obs,
                                          const std::vector<double>& x_state,
                                          std::int64_t shots, std::uint64_t seed);

}  // namespace fracflow
