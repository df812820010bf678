#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "fracflow/census.hpp"
#include "fracflow/circuit.hpp"

namespace fracflow {

/// Index algebra of the padded (d, m) labeling. d = d^ind || d^val packs the
/// section into the top two bits; m = m^hi || m^lo holds a row index in the
/// lower triangle (including the diagonal, m^hi = 0) or a column index in
/// the upper triangle (m^hi = 1). In-range pairs are in bijection with the
/// nonzero entries of G'.
struct LabelScheme {
    ValueCensus census;
    std::int64_t D_prime = 0;
    std::int64_t D = 0;
    std::int64_t M = 0;  // 2N
    std::int64_t S = 0;  // 2D

    struct Entry {
        std::int64_t row = 0;
        std::int64_t col = 0;
    };

    std::int64_t N() const { return census.grid.N; }
    int val_width() const { return census.val_width; }

    Section section_of_label(int d) const { return static_cast<Section>(d >> val_width()); }
    int value_index_of_label(int d) const { return d & ((1 << val_width()) - 1); }

    /// Column offset of a section's lower-triangle entry (row - col).
    std::int64_t section_offset(Section s) const;

    /// True when (section, m_lo) addresses a position inside the band
    /// structure (the complement of out-of-range conditions 2-4).
    bool position_valid(Section s, std::int64_t m_lo) const;

    /// Value index carried by the matrix at the position addressed by
    /// (section, m_lo), or -1 when the coupling is absent.
    int position_value_index(Section s, std::int64_t m_lo) const;

    bool in_range(int d, std::int64_t m) const;
    std::optional<Entry> entry_of(int d, std::int64_t m) const;

    /// Inverse map: the (d, m) pair addressing a nonzero entry (row, col).
    std::optional<std::pair<int, std::int64_t>> index_of_entry(std::int64_t row,
                                                               std::int64_t col) const;

    std::int64_t count_in_range() const;
};

LabelScheme build_label_scheme(const ValueCensus& census, const GridSpec& grid);

/// data | del | in_range | s_hi | s_mid | s_else | s_lo | n_c | n_b | n_a.
RegisterLayout block_encoding_layout(const LabelScheme& scheme);

Circuit o_t_circuit(const RegisterLayout& layout, const LabelScheme& scheme);
Circuit o_c_circuit(const RegisterLayout& layout, const LabelScheme& scheme);
Circuit o_rg_circuit(const RegisterLayout& layout, const LabelScheme& scheme);

/// Pad detector: one gate per padded (section, d^val) combination.
Circuit control_dprime(const RegisterLayout& layout, const LabelScheme& scheme);

/// Z plus the value-keyed R_X(2 arccos G'_d) on the data qubit.
Circuit data_rotation(const RegisterLayout& layout, const LabelScheme& scheme);

Circuit assemble_block_encoding(const LabelScheme& scheme, const RegisterLayout& layout);

struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BlockEncodingResult {
    Circuit circuit;
    double measured_subnorm = 0.0;
    double max_block_error = 0.0;
    int qubit_count = 0;
    std::map<std::string, std::int64_t> counts;

    std::string to_json(std::int64_t N, std::int64_t D_prime, std::int64_t D) const;
};

/// Realize the circuit densely, extract the ancilla-zero block, fit the
/// proportionality constant against G', and fail loudly above 1e-8 residual.
BlockEncodingResult verify_block(const Circuit& circuit, const ScaledOperator& scaled);

/// Primitive-cost audit. A plain gate costs 1, a multi-controlled X costs
/// 1 + controls, an adder costs 1 + controls + register width, and a
/// value-keyed rotation costs entries * (1 + register width). The value-match
/// part of the out-of-range oracle is the census-backed coordinate-to-value
/// lookup; it is reported separately and assumed polylog at field scale.
struct BlockEncodingAudit {
    std::int64_t log2_N = 0;
    std::int64_t D_prime = 0;
    std::int64_t D = 0;
    int qubits = 0;
    std::map<std::string, std::int64_t> counts;
    std::int64_t structural_cost = 0;
    std::int64_t value_lookup_cost = 0;
};

std::int64_t weighted_gate_cost(const Circuit& c);
BlockEncodingAudit audit_block_encoding(const LabelScheme& scheme);

namespace detail {
/// Out-of-range conditions 1-4 plus the gated pad detector, without the
/// value-match gates.
Circuit o_rg_structural(const RegisterLayout& layout, const LabelScheme& scheme);
/// Census-compiled value-match gates (cube covers over m^lo).
Circuit o_rg_value_match(const RegisterLayout& layout, const LabelScheme& scheme);
}  // namespace detail

}  // namespace fracflow
