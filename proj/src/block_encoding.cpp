#include "fracflow/block_encoding.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace fracflow {

std::int64_t LabelScheme::section_offset(Section s) const {
    const std::int64_t n = census.grid.n;
    switch (s) {
        case Section::Diagonal: return 0;
        case Section::BandZ: return 1;
        case Section::BandY: return n;
        case Section::BandX: return n * n;
    }
    throw std::logic_error("section_offset: bad section");
}

bool LabelScheme::position_valid(Section s, std::int64_t m_lo) const {
    const std::int64_t n = census.grid.n;
    switch (s) {
        case Section::Diagonal: return true;
        case Section::BandZ: return m_lo % n != 0;
        case Section::BandY: return (m_lo / n) % n != 0;
        case Section::BandX: return m_lo >= n * n;
    }
    return false;
}

int LabelScheme::position_value_index(Section s, std::int64_t m_lo) const {
    if (!position_valid(s, m_lo)) return -1;
    const auto u = static_cast<std::size_t>(m_lo);
    switch (s) {
        case Section::Diagonal: return census.diag_val[u];
        case Section::BandZ: return census.z_val[u];
        case Section::BandY: return census.y_val[u];
        case Section::BandX: return census.x_val[u];
    }
    return -1;
}

bool LabelScheme::in_range(int d, std::int64_t m) const {
    if (d < 0 || d >= D || m < 0 || m >= M) return false;
    const Section s = section_of_label(d);
    const int v = value_index_of_label(d);
    const bool m_hi = m >= N();
    const std::int64_t m_lo = m % N();
    if (s == Section::Diagonal && m_hi) return false;
    const int have = position_value_index(s, m_lo);
    return have >= 0 && have == v;
}

std::optional<LabelScheme::Entry> LabelScheme::entry_of(int d, std::int64_t m) const {
    if (!in_range(d, m)) return std::nullopt;
    const Section s = section_of_label(d);
    const bool m_hi = m >= N();
    const std::int64_t m_lo = m % N();
    const std::int64_t off = section_offset(s);
    Entry e;
    if (m_hi) {
        e.col = m_lo;
        e.row = m_lo - off;
    } else {
        e.row = m_lo;
        e.col = m_lo - off;
    }
    return e;
}

std::optional<std::pair<int, std::int64_t>> LabelScheme::index_of_entry(std::int64_t row,
                                                                        std::int64_t col) const {
    const int d = census.label_of_entry(row, col);
    if (d < 0) return std::nullopt;
    const std::int64_t m = row >= col ? row : N() + col;
    return std::make_pair(d, m);
}

std::int64_t LabelScheme::count_in_range() const {
    std::int64_t count = 0;
    for (int d = 0; d < D; ++d) {
        for (std::int64_t m = 0; m < M; ++m) {
            if (in_range(d, m)) ++count;
        }
    }
    return count;
}

LabelScheme build_label_scheme(const ValueCensus& census, const GridSpec& grid) {
    if (census.grid.N != grid.N || census.grid.L != grid.L) {
        throw std::domain_error("build_label_scheme: census does not match the grid");
    }
    LabelScheme scheme;
    scheme.census = census;
    scheme.D_prime = census.D_prime;
    scheme.D = census.D;
    scheme.M = 2 * grid.N;
    scheme.S = 2 * census.D;
    return scheme;
}

RegisterLayout block_encoding_layout(const LabelScheme& scheme) {
    const GridSpec& grid = scheme.census.grid;
    if (grid.ell < 1) {
        throw std::domain_error("block_encoding_layout: need at least a 2x2x2 grid");
    }
    RegisterLayout layout;
    layout.registers = {
        {"data", 1},
        {"del", 1},
        {"in_range", 1},
        {"s_hi", 1},
        {"s_mid", 1},
        {"s_else", scheme.census.val_width},
        {"s_lo", 1},
        {"n_c", grid.ell},
        {"n_b", grid.ell},
        {"n_a", grid.ell},
    };
    return layout;
}

namespace {

struct Regs {
    int data, del, in_range, s_hi, s_mid, s_lo;
    std::vector<int> s_else;
    std::vector<int> n_c, n_b, n_a;
    std::vector<int> m_lo;   // n_c || n_b || n_a
    std::vector<int> d_reg;  // s_hi, s_mid, s_else
    std::vector<int> s_all;  // s_hi, s_mid, s_else, s_lo
};

Regs regs_of(const RegisterLayout& layout) {
    Regs r;
    r.data = layout.offset("data");
    r.del = layout.offset("del");
    r.in_range = layout.offset("in_range");
    r.s_hi = layout.offset("s_hi");
    r.s_mid = layout.offset("s_mid");
    r.s_lo = layout.offset("s_lo");
    r.s_else = layout.qubits("s_else");
    r.n_c = layout.qubits("n_c");
    r.n_b = layout.qubits("n_b");
    r.n_a = layout.qubits("n_a");
    r.m_lo = r.n_c;
    r.m_lo.insert(r.m_lo.end(), r.n_b.begin(), r.n_b.end());
    r.m_lo.insert(r.m_lo.end(), r.n_a.begin(), r.n_a.end());
    r.d_reg = {r.s_hi, r.s_mid};
    r.d_reg.insert(r.d_reg.end(), r.s_else.begin(), r.s_else.end());
    r.s_all = r.d_reg;
    r.s_all.push_back(r.s_lo);
    return r;
}

/// Control pattern picking out one section on (s_hi, s_mid).
std::vector<ControlBit> section_controls(const Regs& r, Section s) {
    const int code = static_cast<int>(s);
    return {ControlBit{r.s_hi, (code & 2) != 0}, ControlBit{r.s_mid, (code & 1) != 0}};
}

void append_value_controls(std::vector<ControlBit>& controls, const Regs& r, int value) {
    const int w = static_cast<int>(r.s_else.size());
    for (int i = 0; i < w; ++i) {
        const bool bit = ((value >> (w - 1 - i)) & 1) != 0;
        controls.push_back(ControlBit{r.s_else[static_cast<std::size_t>(i)], bit});
    }
}

std::vector<ControlBit> all_open(const std::vector<int>& qubits) {
    std::vector<ControlBit> out;
    out.reserve(qubits.size());
    for (int q : qubits) out.push_back(ControlBit{q, false});
    return out;
}

// Disjoint cube cover of {m_lo : state[m_lo] == 1} where 0 = keep and
// -1 = don't care; cubes are prefix ranges of the m_lo register.
void cover_mismatches(const std::vector<std::int8_t>& state, std::int64_t lo, std::int64_t size,
                      int depth, std::vector<std::pair<int, std::int64_t>>& cubes) {
    bool any_mismatch = false;
    bool any_match = false;
    for (std::int64_t x = lo; x < lo + size; ++x) {
        if (state[static_cast<std::size_t>(x)] == 1) any_mismatch = true;
        if (state[static_cast<std::size_t>(x)] == 0) any_match = true;
        if (any_match && any_mismatch) break;
    }
    if (!any_mismatch) return;
    if (!any_match) {
        cubes.emplace_back(depth, lo);
        return;
    }
    const std::int64_t half = size / 2;
    cover_mismatches(state, lo, half, depth + 1, cubes);
    cover_mismatches(state, lo + half, half, depth + 1, cubes);
}

std::vector<ControlBit> cube_controls(const Regs& r, int depth, std::int64_t lo, int total_bits) {
    std::vector<ControlBit> out;
    for (int i = 0; i < depth; ++i) {
        const bool bit = ((lo >> (total_bits - 1 - i)) & 1) != 0;
        out.push_back(ControlBit{r.m_lo[static_cast<std::size_t>(i)], bit});
    }
    return out;
}

Circuit with_layout(const RegisterLayout& layout) {
    Circuit c;
    c.layout = layout;
    return c;
}

void append_adders(Circuit& c, const Regs& r, const LabelScheme& scheme, int sign,
                   bool mirrored_order) {
    const std::int64_t n = scheme.census.grid.n;
    const std::int64_t N = scheme.N();
    auto adder = [&](Section s, const std::vector<int>& reg, std::uint64_t modulus) {
        std::vector<ControlBit> controls = section_controls(r, s);
        controls.push_back(ControlBit{r.s_lo, false});  // only the lower-triangle half shifts
        return Gate::cmadd(std::move(controls), reg, sign, modulus);
    };
    if (!mirrored_order) {
        c.append(adder(Section::BandX, r.n_c, static_cast<std::uint64_t>(n)));
        c.append(adder(Section::BandY, r.n_b, static_cast<std::uint64_t>(n)));
        c.append(adder(Section::BandZ, r.m_lo, static_cast<std::uint64_t>(N)));
    } else {
        c.append(adder(Section::BandZ, r.m_lo, static_cast<std::uint64_t>(N)));
        c.append(adder(Section::BandY, r.n_b, static_cast<std::uint64_t>(n)));
        c.append(adder(Section::BandX, r.n_c, static_cast<std::uint64_t>(n)));
    }
}

}  // namespace

Circuit o_t_circuit(const RegisterLayout& layout, const LabelScheme& scheme) {
    (void)scheme;
    const Regs r = regs_of(layout);
    Circuit c = with_layout(layout);
    for (Section s : {Section::BandZ, Section::BandY, Section::BandX}) {
        c.append(Gate::mcx(section_controls(r, s), r.s_lo));
    }
    c.validate();
    return c;
}

Circuit o_c_circuit(const RegisterLayout& layout, const LabelScheme& scheme) {
    const Regs r = regs_of(layout);
    Circuit c = with_layout(layout);
    append_adders(c, r, scheme, -1, /*mirrored_order=*/true);
    c.validate();
    return c;
}

Circuit control_dprime(const RegisterLayout& layout, const LabelScheme& scheme) {
    const Regs r = regs_of(layout);
    Circuit c = with_layout(layout);
    const int capacity = 1 << scheme.val_width();
    for (int s = 0; s < 4; ++s) {
        const int used = scheme.census.section_count(static_cast<Section>(s));
        for (int v = used; v < capacity; ++v) {
            std::vector<ControlBit> controls = section_controls(r, static_cast<Section>(s));
            append_value_controls(controls, r, v);
            c.append(Gate::mcx(std::move(controls), r.del));
        }
    }
    c.validate();
    return c;
}

namespace detail {

Circuit o_rg_structural(const RegisterLayout& layout, const LabelScheme& scheme) {
    const Regs r = regs_of(layout);
    Circuit c = with_layout(layout);

    auto flag_both = [&](std::vector<ControlBit> controls) {
        c.append(Gate::mcx(controls, r.del));
        c.append(Gate::mcx(std::move(controls), r.in_range));
    };

    // condition 1: the diagonal section has no upper-triangle half
    {
        std::vector<ControlBit> controls = section_controls(r, Section::Diagonal);
        controls.push_back(ControlBit{r.s_lo, true});
        flag_both(std::move(controls));
    }
    // condition 2: +-1 band rows need a z predecessor
    {
        std::vector<ControlBit> controls = section_controls(r, Section::BandZ);
        const auto zeros = all_open(r.n_a);
        controls.insert(controls.end(), zeros.begin(), zeros.end());
        flag_both(std::move(controls));
    }
    // condition 3: +-n band rows need a y predecessor
    {
        std::vector<ControlBit> controls = section_controls(r, Section::BandY);
        const auto zeros = all_open(r.n_b);
        controls.insert(controls.end(), zeros.begin(), zeros.end());
        flag_both(std::move(controls));
    }
    // condition 4: +-n^2 band rows need an x predecessor
    {
        std::vector<ControlBit> controls = section_controls(r, Section::BandX);
        const auto zeros = all_open(r.n_c);
        controls.insert(controls.end(), zeros.begin(), zeros.end());
        flag_both(std::move(controls));
    }
    // condition 5: padded value labels, gated so del flips at most once
    {
        const Circuit pads = control_dprime(layout, scheme);
        for (Gate g : pads.gates) {
            g.controls.push_back(ControlBit{r.in_range, false});
            c.append(std::move(g));
        }
    }
    c.validate();
    return c;
}

Circuit o_rg_value_match(const RegisterLayout& layout, const LabelScheme& scheme) {
    const Regs r = regs_of(layout);
    Circuit c = with_layout(layout);
    const std::int64_t N = scheme.N();
    const int bits = static_cast<int>(r.m_lo.size());

    for (int s_idx = 0; s_idx < 4; ++s_idx) {
        const Section s = static_cast<Section>(s_idx);
        const int used = scheme.census.section_count(s);
        std::vector<std::int8_t> state(static_cast<std::size_t>(N));
        for (int v = 0; v < used; ++v) {
            bool any = false;
            for (std::int64_t m_lo = 0; m_lo < N; ++m_lo) {
                std::int8_t st = -1;  // geometric invalidity is handled by conditions 2-4
                if (scheme.position_valid(s, m_lo)) {
                    st = scheme.position_value_index(s, m_lo) == v ? 0 : 1;
                }
                state[static_cast<std::size_t>(m_lo)] = st;
                any = any || st == 1;
            }
            if (!any) continue;
            std::vector<std::pair<int, std::int64_t>> cubes;
            cover_mismatches(state, 0, N, 0, cubes);
            for (const auto& [depth, lo] : cubes) {
                std::vector<ControlBit> controls = section_controls(r, s);
                append_value_controls(controls, r, v);
                controls.push_back(ControlBit{r.in_range, false});
                const auto cube = cube_controls(r, depth, lo, bits);
                controls.insert(controls.end(), cube.begin(), cube.end());
                c.append(Gate::mcx(std::move(controls), r.del));
            }
        }
    }
    c.validate();
    return c;
}

}  // namespace detail

Circuit o_rg_circuit(const RegisterLayout& layout, const LabelScheme& scheme) {
    Circuit c = detail::o_rg_structural(layout, scheme);
    c.extend(detail::o_rg_value_match(layout, scheme));
    return c;
}

Circuit data_rotation(const RegisterLayout& layout, const LabelScheme& scheme) {
    const Regs r = regs_of(layout);
    Circuit c = with_layout(layout);
    c.append(Gate::z(r.data));
    std::vector<std::pair<std::uint64_t, double>> table;
    for (int d = 0; d < scheme.D; ++d) {
        if (!scheme.census.label_is_assigned(d)) continue;
        const double value = scheme.census.value_of_label(d);
        if (std::abs(value) > 1.0) {
            throw std::domain_error("data_rotation: |G'_d| > 1, normalization is broken");
        }
        table.emplace_back(static_cast<std::uint64_t>(d), 2.0 * std::acos(value));
    }
    c.append(Gate::crotx(r.d_reg, std::move(table), r.data));
    c.validate();
    return c;
}

Circuit assemble_block_encoding(const LabelScheme& scheme, const RegisterLayout& layout) {
    const Regs r = regs_of(layout);
    Circuit c = with_layout(layout);

    for (int q : r.s_all) c.append(Gate::h(q));
    append_adders(c, r, scheme, +1, /*mirrored_order=*/false);
    c.extend(o_rg_circuit(layout, scheme));
    c.extend(data_rotation(layout, scheme));
    c.extend(o_t_circuit(layout, scheme));
    append_adders(c, r, scheme, -1, /*mirrored_order=*/true);
    for (int q : r.s_all) c.append(Gate::h(q));

    c.validate();
    return c;
}

std::string BlockEncodingResult::to_json(std::int64_t N, std::int64_t D_prime,
                                         std::int64_t D) const {
    nlohmann::json j;
    j["N"] = N;
    j["D_prime"] = D_prime;
    j["D"] = D;
    j["qubits"] = qubit_count;
    j["gate_counts"] = counts;
    j["measured_subnorm"] = measured_subnorm;
    j["max_block_error"] = max_block_error;
    return j.dump(2);
}

BlockEncodingResult verify_block(const Circuit& circuit, const ScaledOperator& scaled) {
    const DenseUnitary u = to_unitary(circuit);
    const std::int64_t N = scaled.op.N;
    if (u.dim() < N) {
        throw std::domain_error("verify_block: circuit is too small for the operator");
    }

    double num = 0.0, den = 0.0;
    for (std::int64_t i = 0; i < N; ++i) {
        for (std::int64_t j = 0; j < N; ++j) {
            const double g = scaled.op.entry(i, j);
            num += u.at(i, j).real() * g;
            den += g * g;
        }
    }
    const double t = num / den;  // block ~ t * G'

    double max_err = 0.0;
    std::int64_t worst_i = 0, worst_j = 0;
    for (std::int64_t i = 0; i < N; ++i) {
        for (std::int64_t j = 0; j < N; ++j) {
            const double g = scaled.op.entry(i, j);
            const double err = std::abs(u.at(i, j) - Amplitude{t * g, 0.0});
            if (err > max_err) {
                max_err = err;
                worst_i = i;
                worst_j = j;
            }
        }
    }

    BlockEncodingResult result;
    result.circuit = circuit;
    result.measured_subnorm = 1.0 / t;
    // report the residual on the scale of the fitted block
    result.max_block_error = max_err / std::abs(t);
    result.qubit_count = circuit.total_qubits();
    result.counts = gate_counts(circuit);

    if (result.max_block_error > 1e-8) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "verify_block: residual %.3e at entry (%lld, %lld): expected %.17g, got "
                      "%.17g (subnorm fit %.17g)",
                      result.max_block_error, static_cast<long long>(worst_i),
                      static_cast<long long>(worst_j), t * scaled.op.entry(worst_i, worst_j),
                      u.at(worst_i, worst_j).real(), result.measured_subnorm);
        throw VerificationFailure(buf);
    }
    return result;
}

std::int64_t weighted_gate_cost(const Circuit& c) {
    std::int64_t cost = 0;
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case Gate::Kind::PauliX:
            case Gate::Kind::Hadamard:
            case Gate::Kind::PauliZ:
                cost += 1;
                break;
            case Gate::Kind::MultiControlledX:
                cost += 1 + static_cast<std::int64_t>(g.controls.size());
                break;
            case Gate::Kind::ControlledRotX:
                cost += static_cast<std::int64_t>(g.angle_table.size()) *
                        (1 + static_cast<std::int64_t>(g.reg.size()));
                break;
            case Gate::Kind::ControlledModularAdd:
                cost += 1 + static_cast<std::int64_t>(g.controls.size()) +
                        static_cast<std::int64_t>(g.reg.size());
                break;
        }
    }
    return cost;
}

BlockEncodingAudit audit_block_encoding(const LabelScheme& scheme) {
    const RegisterLayout layout = block_encoding_layout(scheme);
    const Regs r = regs_of(layout);

    BlockEncodingAudit audit;
    audit.log2_N = 3 * scheme.census.grid.ell;
    audit.D_prime = scheme.D_prime;
    audit.D = scheme.D;
    audit.qubits = layout.total_qubits();

    Circuit structural = with_layout(layout);
    for (int q : r.s_all) structural.append(Gate::h(q));
    append_adders(structural, r, scheme, +1, false);
    structural.extend(detail::o_rg_structural(layout, scheme));
    structural.extend(data_rotation(layout, scheme));
    structural.extend(o_t_circuit(layout, scheme));
    append_adders(structural, r, scheme, -1, true);
    for (int q : r.s_all) structural.append(Gate::h(q));

    const Circuit value_match = detail::o_rg_value_match(layout, scheme);

    audit.structural_cost = weighted_gate_cost(structural);
    audit.value_lookup_cost = weighted_gate_cost(value_match);
    audit.counts = gate_counts(assemble_block_encoding(scheme, layout));
    return audit;
}

}  // namespace fracflow
