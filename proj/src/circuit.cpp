#include "fracflow/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fracflow {

int RegisterLayout::total_qubits() const {
    int total = 0;
    for (const auto& [name, width] : registers) total += width;
    return total;
}

bool RegisterLayout::has(const std::string& name) const {
    for (const auto& [reg, width] : registers)
        if (reg == name) return true;
    return false;
}

int RegisterLayout::width(const std::string& name) const {
    for (const auto& [reg, w] : registers)
        if (reg == name) return w;
    throw std::domain_error("RegisterLayout: no register named " + name);
}

int RegisterLayout::offset(const std::string& name) const {
    int off = 0;
    for (const auto& [reg, w] : registers) {
        if (reg == name) return off;
        off += w;
    }
    throw std::domain_error("RegisterLayout: no register named " + name);
}

std::vector<int> RegisterLayout::qubits(const std::string& name) const {
    const int off = offset(name);
    const int w = width(name);
    std::vector<int> out(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) out[static_cast<std::size_t>(i)] = off + i;
    return out;
}

Gate Gate::x(int target) {
    Gate g;
    g.kind = Kind::PauliX;
    g.target = target;
    return g;
}

Gate Gate::h(int target) {
    Gate g;
    g.kind = Kind::Hadamard;
    g.target = target;
    return g;
}

Gate Gate::z(int target) {
    Gate g;
    g.kind = Kind::PauliZ;
    g.target = target;
    return g;
}

Gate Gate::mcx(std::vector<ControlBit> controls, int target) {
    Gate g;
    g.kind = Kind::MultiControlledX;
    g.controls = std::move(controls);
    g.target = target;
    return g;
}

Gate Gate::crotx(std::vector<int> reg, std::vector<std::pair<std::uint64_t, double>> table,
                 int target) {
    Gate g;
    g.kind = Kind::ControlledRotX;
    g.reg = std::move(reg);
    g.angle_table = std::move(table);
    std::sort(g.angle_table.begin(), g.angle_table.end());
    for (const auto& [value, angle] : g.angle_table) {
        if (!std::isfinite(angle)) throw std::domain_error("crotx: non-finite angle");
    }
    g.target = target;
    return g;
}

Gate Gate::cmadd(std::vector<ControlBit> controls, std::vector<int> reg, std::int64_t addend,
                 std::uint64_t modulus) {
    if (modulus == 0) throw std::domain_error("cmadd: modulus must be positive");
    Gate g;
    g.kind = Kind::ControlledModularAdd;
    g.controls = std::move(controls);
    g.reg = std::move(reg);
    const auto m = static_cast<std::int64_t>(modulus);
    g.addend = ((addend % m) + m) % m;
    g.modulus = modulus;
    return g;
}

const char* to_string(Gate::Kind k) {
    switch (k) {
        case Gate::Kind::PauliX: return "x";
        case Gate::Kind::Hadamard: return "h";
        case Gate::Kind::PauliZ: return "z";
        case Gate::Kind::MultiControlledX: return "mcx";
        case Gate::Kind::ControlledRotX: return "crotx";
        case Gate::Kind::ControlledModularAdd: return "cmadd";
    }
    return "?";
}

void Circuit::append(Gate g) { gates.push_back(std::move(g)); }

void Circuit::extend(const Circuit& other) {
    if (other.total_qubits() != total_qubits()) {
        throw std::domain_error("Circuit::extend: qubit count mismatch");
    }
    gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

void Circuit::validate() const {
    const int q = total_qubits();
    for (const Gate& g : gates) {
        std::set<int> used;
        auto touch = [&](int qubit) {
            if (qubit < 0 || qubit >= q) {
                throw std::domain_error("circuit: qubit id out of range");
            }
            if (!used.insert(qubit).second) {
                throw std::domain_error("circuit: gate touches a qubit twice");
            }
        };
        if (g.kind != Gate::Kind::ControlledModularAdd) touch(g.target);
        for (const ControlBit& c : g.controls) touch(c.qubit);
        for (int r : g.reg) touch(r);
        if (g.kind == Gate::Kind::ControlledModularAdd && g.modulus > (1ULL << g.reg.size())) {
            throw std::domain_error("circuit: adder modulus exceeds register capacity");
        }
    }
}

State zero_state(int qubits) {
    State s(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
    s[0] = Amplitude{1.0, 0.0};
    return s;
}

State basis_state(int qubits, std::uint64_t index) {
    State s(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
    s.at(index) = Amplitude{1.0, 0.0};
    return s;
}

namespace {

inline std::uint64_t qubit_mask(int total, int qubit) {
    return std::uint64_t{1} << (total - 1 - qubit);
}

inline bool controls_satisfied(std::uint64_t x, const std::vector<std::uint64_t>& pos_masks,
                               const std::vector<std::uint64_t>& neg_masks) {
    for (std::uint64_t m : pos_masks)
        if (!(x & m)) return false;
    for (std::uint64_t m : neg_masks)
        if (x & m) return false;
    return true;
}

struct ControlMasks {
    std::vector<std::uint64_t> pos, neg;
};

ControlMasks control_masks(int total, const std::vector<ControlBit>& controls) {
    ControlMasks cm;
    for (const ControlBit& c : controls) {
        (c.positive ? cm.pos : cm.neg).push_back(qubit_mask(total, c.qubit));
    }
    return cm;
}

std::uint64_t extract_register(std::uint64_t x, int total, const std::vector<int>& reg) {
    std::uint64_t v = 0;
    for (int q : reg) {
        v = (v << 1) | ((x & qubit_mask(total, q)) ? 1u : 0u);
    }
    return v;
}

std::uint64_t insert_register(std::uint64_t x, int total, const std::vector<int>& reg,
                              std::uint64_t value) {
    for (std::size_t i = reg.size(); i-- > 0;) {
        const std::uint64_t m = qubit_mask(total, reg[i]);
        if (value & 1) {
            x |= m;
        } else {
            x &= ~m;
        }
        value >>= 1;
    }
    return x;
}

void apply_gate(const Gate& g, int total, State& s) {
    const std::uint64_t dim = std::uint64_t{1} << total;
    switch (g.kind) {
        case Gate::Kind::PauliX: {
            const std::uint64_t m = qubit_mask(total, g.target);
            for (std::uint64_t x = 0; x < dim; ++x) {
                if (!(x & m)) std::swap(s[x], s[x | m]);
            }
            break;
        }
        case Gate::Kind::Hadamard: {
            const std::uint64_t m = qubit_mask(total, g.target);
            const double inv_sqrt2 = 0.70710678118654752440084436210485;
            for (std::uint64_t x = 0; x < dim; ++x) {
                if (x & m) continue;
                const Amplitude a = s[x];
                const Amplitude b = s[x | m];
                s[x] = (a + b) * inv_sqrt2;
                s[x | m] = (a - b) * inv_sqrt2;
            }
            break;
        }
        case Gate::Kind::PauliZ: {
            const std::uint64_t m = qubit_mask(total, g.target);
            for (std::uint64_t x = 0; x < dim; ++x) {
                if (x & m) s[x] = -s[x];
            }
            break;
        }
        case Gate::Kind::MultiControlledX: {
            const std::uint64_t m = qubit_mask(total, g.target);
            const ControlMasks cm = control_masks(total, g.controls);
            for (std::uint64_t x = 0; x < dim; ++x) {
                if ((x & m) || !controls_satisfied(x, cm.pos, cm.neg)) continue;
                std::swap(s[x], s[x | m]);
            }
            break;
        }
        case Gate::Kind::ControlledRotX: {
            const std::uint64_t m = qubit_mask(total, g.target);
            for (std::uint64_t x = 0; x < dim; ++x) {
                if (x & m) continue;
                const std::uint64_t v = extract_register(x, total, g.reg);
                const auto it = std::lower_bound(
                    g.angle_table.begin(), g.angle_table.end(), v,
                    [](const std::pair<std::uint64_t, double>& e, std::uint64_t key) {
                        return e.first < key;
                    });
                if (it == g.angle_table.end() || it->first != v) continue;  // identity branch
                const double half = 0.5 * it->second;
                const double c = std::cos(half);
                const double sn = std::sin(half);
                const Amplitude a = s[x];
                const Amplitude b = s[x | m];
                s[x] = c * a + Amplitude{0.0, -sn} * b;
                s[x | m] = Amplitude{0.0, -sn} * a + c * b;
            }
            break;
        }
        case Gate::Kind::ControlledModularAdd: {
            const ControlMasks cm = control_masks(total, g.controls);
            State next = s;
            for (std::uint64_t x = 0; x < dim; ++x) {
                if (!controls_satisfied(x, cm.pos, cm.neg)) continue;
                const std::uint64_t v = extract_register(x, total, g.reg);
                if (v >= g.modulus) continue;  // outside the modular range, left fixed
                const std::uint64_t v2 =
                    (v + static_cast<std::uint64_t>(g.addend)) % g.modulus;
                const std::uint64_t y = insert_register(x, total, g.reg, v2);
                next[y] = s[x];
            }
            s = std::move(next);
            break;
        }
    }
}

}  // namespace

State apply_to_state(const Circuit& c, State state) {
    if (state.size() != (std::size_t{1} << c.total_qubits())) {
        throw std::domain_error("apply_to_state: state dimension mismatch");
    }
    for (const Gate& g : c.gates) apply_gate(g, c.total_qubits(), state);
    return state;
}

std::uint64_t apply_to_basis(const Circuit& c, std::uint64_t index) {
    const int total = c.total_qubits();
    if (index >= (std::uint64_t{1} << total)) {
        throw std::domain_error("apply_to_basis: index out of range");
    }
    std::uint64_t x = index;
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case Gate::Kind::PauliX:
                x ^= qubit_mask(total, g.target);
                break;
            case Gate::Kind::MultiControlledX: {
                const ControlMasks cm = control_masks(total, g.controls);
                if (controls_satisfied(x, cm.pos, cm.neg)) x ^= qubit_mask(total, g.target);
                break;
            }
            case Gate::Kind::ControlledModularAdd: {
                const ControlMasks cm = control_masks(total, g.controls);
                if (!controls_satisfied(x, cm.pos, cm.neg)) break;
                const std::uint64_t v = extract_register(x, total, g.reg);
                if (v >= g.modulus) break;
                const std::uint64_t v2 =
                    (v + static_cast<std::uint64_t>(g.addend)) % g.modulus;
                x = insert_register(x, total, g.reg, v2);
                break;
            }
            default:
                throw std::domain_error(
                    "apply_to_basis: circuit contains an amplitude-mixing gate");
        }
    }
    return x;
}

int dense_unitary_qubit_guard() {
    if (const char* env = std::getenv("FRACFLOW_QUBIT_GUARD")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 12;
}

DenseUnitary to_unitary(const Circuit& c) {
    const int guard = dense_unitary_qubit_guard();
    if (c.total_qubits() > guard) {
        throw std::domain_error("to_unitary: " + std::to_string(c.total_qubits()) +
                                " qubits exceeds the dense realization guard of " +
                                std::to_string(guard) +
                                " (override with FRACFLOW_QUBIT_GUARD)");
    }
    DenseUnitary u;
    u.qubits = c.total_qubits();
    const std::int64_t dim = u.dim();
    u.data.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim),
                  Amplitude{0.0, 0.0});
    for (std::int64_t col = 0; col < dim; ++col) {
        State s = apply_to_state(c, basis_state(u.qubits, static_cast<std::uint64_t>(col)));
        for (std::int64_t row = 0; row < dim; ++row) {
            u.at(row, col) = s[static_cast<std::size_t>(row)];
        }
    }
    return u;
}

Circuit inverse(const Circuit& c) {
    Circuit inv;
    inv.layout = c.layout;
    inv.gates.reserve(c.gates.size());
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        Gate g = *it;
        switch (g.kind) {
            case Gate::Kind::PauliX:
            case Gate::Kind::Hadamard:
            case Gate::Kind::PauliZ:
            case Gate::Kind::MultiControlledX:
                break;  // self inverse
            case Gate::Kind::ControlledRotX:
                for (auto& [value, angle] : g.angle_table) angle = -angle;
                break;
            case Gate::Kind::ControlledModularAdd:
                g = Gate::cmadd(g.controls, g.reg, -g.addend, g.modulus);
                break;
        }
        inv.gates.push_back(std::move(g));
    }
    return inv;
}

std::map<std::string, std::int64_t> gate_counts(const Circuit& c) {
    std::map<std::string, std::int64_t> counts;
    for (const Gate& g : c.gates) counts[to_string(g.kind)]++;
    return counts;
}

namespace {

std::string controls_to_text(const std::vector<ControlBit>& controls) {
    std::string out;
    for (const ControlBit& c : controls) {
        out += c.positive ? " +" : " -";
        out += std::to_string(c.qubit);
    }
    return out;
}

std::string reg_to_text(const std::vector<int>& reg) {
    std::string out;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(reg[i]);
    }
    return out;
}

}  // namespace

std::string serialize(const Circuit& c) {
    std::ostringstream out;
    out << "circuit v1\n";
    out << "qubits " << c.total_qubits() << "\n";
    for (const auto& [name, width] : c.layout.registers) {
        out << "reg " << name << " " << width << "\n";
    }
    char buf[64];
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case Gate::Kind::PauliX:
            case Gate::Kind::Hadamard:
            case Gate::Kind::PauliZ:
                out << to_string(g.kind) << " t" << g.target << "\n";
                break;
            case Gate::Kind::MultiControlledX:
                out << "mcx" << controls_to_text(g.controls) << " t" << g.target << "\n";
                break;
            case Gate::Kind::ControlledRotX: {
                out << "crotx reg=" << reg_to_text(g.reg) << " t" << g.target << " table=";
                for (std::size_t i = 0; i < g.angle_table.size(); ++i) {
                    if (i) out << ";";
                    std::snprintf(buf, sizeof(buf), "%llu:%.17g",
                                  static_cast<unsigned long long>(g.angle_table[i].first),
                                  g.angle_table[i].second);
                    out << buf;
                }
                out << "\n";
                break;
            }
            case Gate::Kind::ControlledModularAdd:
                out << "cmadd reg=" << reg_to_text(g.reg) << " add=" << g.addend
                    << " mod=" << g.modulus << controls_to_text(g.controls) << "\n";
                break;
        }
    }
    out << "end\n";
    return out.str();
}

namespace {

std::vector<int> parse_reg_list(const std::string& text) {
    std::vector<int> reg;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        if (!token.empty()) reg.push_back(std::stoi(token));
    }
    return reg;
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Circuit c;
    int declared_qubits = -1;
    std::int64_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("circuit parse error at line " + std::to_string(lineno) + ": " +
                                 what);
    };

    if (!std::getline(in, line)) throw std::runtime_error("circuit parse error: empty input");
    ++lineno;
    if (line != "circuit v1") fail("expected 'circuit v1' header");

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "end") break;
        if (word == "qubits") {
            ls >> declared_qubits;
            continue;
        }
        if (word == "reg") {
            std::string name;
            int width = 0;
            if (!(ls >> name >> width)) fail("bad register line");
            c.layout.registers.emplace_back(name, width);
            continue;
        }

        std::vector<ControlBit> controls;
        std::vector<int> reg;
        std::vector<std::pair<std::uint64_t, double>> table;
        int target = -1;
        std::int64_t addend = 0;
        std::uint64_t modulus = 0;
        std::string token;
        while (ls >> token) {
            if (token[0] == '+' || token[0] == '-') {
                controls.push_back(ControlBit{std::stoi(token.substr(1)), token[0] == '+'});
            } else if (token.rfind("reg=", 0) == 0) {
                reg = parse_reg_list(token.substr(4));
            } else if (token.rfind("add=", 0) == 0) {
                addend = std::stoll(token.substr(4));
            } else if (token.rfind("mod=", 0) == 0) {
                modulus = std::stoull(token.substr(4));
            } else if (token.rfind("table=", 0) == 0) {
                std::istringstream ts(token.substr(6));
                std::string entry;
                while (std::getline(ts, entry, ';')) {
                    const auto colon = entry.find(':');
                    if (colon == std::string::npos) fail("bad rotation table entry");
                    table.emplace_back(std::stoull(entry.substr(0, colon)),
                                       std::stod(entry.substr(colon + 1)));
                }
            } else if (token[0] == 't') {
                target = std::stoi(token.substr(1));
            } else {
                fail("unrecognized token '" + token + "'");
            }
        }
        if (word == "x") {
            c.append(Gate::x(target));
        } else if (word == "h") {
            c.append(Gate::h(target));
        } else if (word == "z") {
            c.append(Gate::z(target));
        } else if (word == "mcx") {
            c.append(Gate::mcx(std::move(controls), target));
        } else if (word == "crotx") {
            c.append(Gate::crotx(std::move(reg), std::move(table), target));
        } else if (word == "cmadd") {
            c.append(Gate::cmadd(std::move(controls), std::move(reg), addend, modulus));
        } else {
            fail("unknown gate '" + word + "'");
        }
    }
    if (declared_qubits >= 0 && declared_qubits != c.total_qubits()) {
        throw std::runtime_error("circuit parse error: qubit count does not match registers");
    }
    c.validate();
    return c;
}

}  // namespace fracflow
