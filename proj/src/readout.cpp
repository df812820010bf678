#include "fracflow/readout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracflow/random.hpp"

namespace fracflow {

RegionObservable region_state_prep(std::int64_t i, std::int64_t j, std::int64_t k, int ell,
                                   int t) {
    const std::int64_t n = std::int64_t{1} << ell;
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) {
        throw std::domain_error("region_state_prep: base cell out of range");
    }
    if (t < 0) throw std::domain_error("region_state_prep: refinement steps must be >= 0");

    const int level = ell + t;
    const std::int64_t n_t = std::int64_t{1} << level;
    const int qubits = 3 * level;

    RegionObservable obs;
    obs.base_cell = CellCoords{i, j, k};
    obs.base_level = ell;
    obs.target_level = level;
    obs.amplitude = std::pow(8.0, -0.5 * static_cast<double>(t));

    obs.prep_circuit.layout.registers = {{"i_field", level}, {"j_field", level},
                                         {"k_field", level}};

    const std::int64_t r_shifted = linear_index(i << t, j << t, k << t, n_t);
    for (int q = 0; q < qubits; ++q) {
        if ((r_shifted >> (qubits - 1 - q)) & 1) {
            obs.prep_circuit.append(Gate::x(q));
        }
    }
    // the t freshly inserted low bits of each axis field
    for (int axis = 1; axis <= 3; ++axis) {
        for (int b = 0; b < t; ++b) {
            obs.prep_circuit.append(Gate::h(axis * level - 1 - b));
        }
    }
    obs.prep_circuit.validate();

    const std::int64_t span = std::int64_t{1} << t;
    obs.support.reserve(static_cast<std::size_t>(span * span * span));
    for (std::int64_t a = 0; a < span; ++a) {
        for (std::int64_t b = 0; b < span; ++b) {
            for (std::int64_t c = 0; c < span; ++c) {
                obs.support.push_back(
                    linear_index((i << t) + a, (j << t) + b, (k << t) + c, n_t));
            }
        }
    }
    std::sort(obs.support.begin(), obs.support.end());
    return obs;
}

double exact_overlap(const RegionObservable& obs, const std::vector<double>& x) {
    const std::int64_t dim = std::int64_t{1} << (3 * obs.target_level);
    if (static_cast<std::int64_t>(x.size()) != dim) {
        throw std::domain_error("exact_overlap: vector does not live on the target grid");
    }
    double acc = 0.0;
    for (std::int64_t a : obs.support) acc += x[static_cast<std::size_t>(a)];
    return obs.amplitude * acc;
}

double region_average(const RegionObservable& obs, const std::vector<double>& x) {
    return exact_overlap(obs, x) * obs.amplitude;  // amplitude^2 = 8^-t
}

HadamardTestResult hadamard_test_estimate(const RegionObservable& obs,
                                          const std::vector<double>& x_state,
                                          std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) throw std::domain_error("hadamard_test_estimate: need at least one shot");
    const double overlap = exact_overlap(obs, x_state);
    const double p0 = 0.5 * (1.0 + overlap);

    SplitMix64 rng(seed);
    std::int64_t plus = 0;
    for (std::int64_t s = 0; s < shots; ++s) {
        if (rng.next_double() < p0) ++plus;
    }
    const double mean =
        (2.0 * static_cast<double>(plus) - static_cast<double>(shots)) / static_cast<double>(shots);

    HadamardTestResult result;
    result.estimate = mean;
    result.shots = shots;
    if (shots > 1) {
        // outcomes are +-1: sample variance from the counts
        const double ssq = static_cast<double>(shots) * (1.0 - mean * mean) /
                           static_cast<double>(shots - 1);
        result.std_err = std::sqrt(std::max(0.0, ssq) / static_cast<double>(shots));
    }
    return result;
}

}  // namespace fracflow
