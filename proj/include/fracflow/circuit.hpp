#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fracflow {

/// Ordered named registers. Qubit ids run in listing order and qubit 0 is
/// the most significant bit of a basis index, so a trailing register of
/// width w holds the low w bits.
struct RegisterLayout {
    std::vector<std::pair<std::string, int>> registers;

    int total_qubits() const;
    bool has(const std::string& name) const;
    int width(const std::string& name) const;
    /// First qubit id of the register.
    int offset(const std::string& name) const;
    /// Qubit ids of the register, most significant first.
    std::vector<int> qubits(const std::string& name) const;

    static RegisterLayout single(const std::string& name, int width) {
        return RegisterLayout{{{name, width}}};
    }
};

struct ControlBit {
    int qubit = 0;
    bool positive = true;  // true: closed control on |1>, false: open control on |0>
};

struct Gate {
    enum class Kind {
        PauliX,
        Hadamard,
        PauliZ,
        MultiControlledX,
        ControlledRotX,
        ControlledModularAdd,
    };

    Kind kind = Kind::PauliX;
    int target = -1;                  // all variants except ControlledModularAdd
    std::vector<ControlBit> controls; // MultiControlledX, ControlledModularAdd
    std::vector<int> reg;             // ControlledRotX control register / adder register, MSB first
    std::vector<std::pair<std::uint64_t, double>> angle_table;  // ControlledRotX, sorted by value
    std::int64_t addend = 0;          // ControlledModularAdd, reduced into [0, modulus)
    std::uint64_t modulus = 0;        // ControlledModularAdd

    static Gate x(int target);
    static Gate h(int target);
    static Gate z(int target);
    static Gate mcx(std::vector<ControlBit> controls, int target);
    static Gate crotx(std::vector<int> reg, std::vector<std::pair<std::uint64_t, double>> table,
                      int target);
    static Gate cmadd(std::vector<ControlBit> controls, std::vector<int> reg, std::int64_t addend,
                      std::uint64_t modulus);
};

const char* to_string(Gate::Kind k);

struct Circuit {
    RegisterLayout layout;
    std::vector<Gate> gates;

    int total_qubits() const { return layout.total_qubits(); }
    void append(Gate g);
    void extend(const Circuit& other);  // other must share this layout's qubit count

    /// Throws unless every gate touches distinct, in-range qubits.
    void validate() const;
};

using Amplitude = std::complex<double>;
using State = std::vector<Amplitude>;

State zero_state(int qubits);
State basis_state(int qubits, std::uint64_t index);

/// Apply the circuit's gates in order; norm is preserved to rounding.
State apply_to_state(const Circuit& c, State state);

/// Classical propagation of a computational basis state through a
/// permutation circuit (PauliX / MultiControlledX / ControlledModularAdd
/// only); throws on any amplitude-mixing gate.
std::uint64_t apply_to_basis(const Circuit& c, std::uint64_t index);

struct DenseUnitary {
    int qubits = 0;
    std::vector<Amplitude> data;  // row-major, dim x dim

    std::int64_t dim() const { return std::int64_t{1} << qubits; }
    Amplitude& at(std::int64_t row, std::int64_t col) { return data[row * dim() + col]; }
    const Amplitude& at(std::int64_t row, std::int64_t col) const {
        return data[row * dim() + col];
    }
};

/// Dense-realization qubit budget (default 12); the environment variable
/// FRACFLOW_QUBIT_GUARD overrides it.
int dense_unitary_qubit_guard();

/// Column c equals the circuit applied to basis state c. Refuses circuits
/// beyond the qubit guard.
DenseUnitary to_unitary(const Circuit& c);

Circuit inverse(const Circuit& c);

std::map<std::string, std::int64_t> gate_counts(const Circuit& c);

/// Line-oriented text form, one gate per line; stable for golden tests.
std::string serialize(const Circuit& c);
Circuit parse_circuit(const std::string& text);

}  // namespace fracflow
