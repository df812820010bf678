#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracflow/circuit.hpp"
#include "fracflow/random.hpp"

using namespace fracflow;

namespace {

Circuit on_qubits(int q) {
    Circuit c;
    c.layout = RegisterLayout::single("q", q);
    return c;
}

double unitarity_defect(const DenseUnitary& u) {
    const std::int64_t dim = u.dim();
    double worst = 0.0;
    for (std::int64_t i = 0; i < dim; ++i) {
        for (std::int64_t j = 0; j < dim; ++j) {
            Amplitude acc{0.0, 0.0};
            for (std::int64_t k = 0; k < dim; ++k) {
                acc += std::conj(u.at(k, i)) * u.at(k, j);
            }
            const Amplitude expected = i == j ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
            worst = std::max(worst, std::abs(acc - expected));
        }
    }
    return worst;
}

double max_diff(const DenseUnitary& a, const DenseUnitary& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

Circuit random_circuit(int qubits, int gates, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Circuit c = on_qubits(qubits);
    for (int i = 0; i < gates; ++i) {
        const int pick = static_cast<int>(rng.next_below(6));
        const int target = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(qubits)));
        switch (pick) {
            case 0: c.append(Gate::x(target)); break;
            case 1: c.append(Gate::h(target)); break;
            case 2: c.append(Gate::z(target)); break;
            case 3: {
                std::vector<ControlBit> controls;
                for (int q = 0; q < qubits; ++q) {
                    if (q == target || rng.next_below(2)) continue;
                    controls.push_back(ControlBit{q, rng.next_below(2) == 0});
                }
                c.append(Gate::mcx(std::move(controls), target));
                break;
            }
            case 4: {
                std::vector<int> reg;
                for (int q = 0; q < qubits; ++q) {
                    if (q != target) reg.push_back(q);
                }
                if (reg.size() > 2) reg.resize(2);
                std::vector<std::pair<std::uint64_t, double>> table;
                const std::uint64_t entries = std::uint64_t{1} << reg.size();
                for (std::uint64_t v = 0; v < entries; ++v) {
                    if (rng.next_below(2)) table.emplace_back(v, rng.next_double() * 6.28);
                }
                c.append(Gate::crotx(std::move(reg), std::move(table), target));
                break;
            }
            default: {
                std::vector<int> reg;
                for (int q = 0; q < qubits; ++q) {
                    if (rng.next_below(2)) reg.push_back(q);
                }
                if (reg.empty()) reg.push_back(target);
                std::vector<ControlBit> controls;
                for (int q = 0; q < qubits; ++q) {
                    bool in_reg = false;
                    for (int rq : reg) in_reg = in_reg || rq == q;
                    if (!in_reg && rng.next_below(3) == 0) {
                        controls.push_back(ControlBit{q, rng.next_below(2) == 0});
                    }
                }
                const std::uint64_t modulus = std::uint64_t{1} << reg.size();
                const auto addend = static_cast<std::int64_t>(rng.next_below(2 * modulus)) -
                                    static_cast<std::int64_t>(modulus);
                c.append(Gate::cmadd(std::move(controls), std::move(reg), addend, modulus));
                break;
            }
        }
    }
    c.validate();
    return c;
}

}  // namespace

TEST_CASE("single-qubit gates") {
    Circuit x = on_qubits(1);
    x.append(Gate::x(0));
    const DenseUnitary ux = to_unitary(x);
    CHECK(ux.at(0, 0) == Amplitude{0.0, 0.0});
    CHECK(ux.at(0, 1) == Amplitude{1.0, 0.0});
    CHECK(ux.at(1, 0) == Amplitude{1.0, 0.0});
    CHECK(ux.at(1, 1) == Amplitude{0.0, 0.0});

    Circuit h = on_qubits(1);
    h.append(Gate::h(0));
    const State plus = apply_to_state(h, zero_state(1));
    CHECK(plus[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(plus[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    Circuit empty = on_qubits(2);
    const DenseUnitary ue = to_unitary(empty);
    CHECK(unitarity_defect(ue) == doctest::Approx(0.0));
    CHECK(ue.at(2, 2) == Amplitude{1.0, 0.0});
}

TEST_CASE("composition order matches gate order") {
    // U(c1; c2) = U(c2) * U(c1)
    Circuit c1 = on_qubits(2);
    c1.append(Gate::h(0));
    Circuit c2 = on_qubits(2);
    c2.append(Gate::mcx({ControlBit{0, true}}, 1));
    Circuit both = c1;
    both.extend(c2);

    const DenseUnitary u1 = to_unitary(c1);
    const DenseUnitary u2 = to_unitary(c2);
    const DenseUnitary ub = to_unitary(both);
    for (std::int64_t i = 0; i < 4; ++i) {
        for (std::int64_t j = 0; j < 4; ++j) {
            Amplitude acc{0.0, 0.0};
            for (std::int64_t k = 0; k < 4; ++k) acc += u2.at(i, k) * u1.at(k, j);
            CHECK(std::abs(ub.at(i, j) - acc) < 1e-14);
        }
    }
}

TEST_CASE("modular adders permute basis states") {
    Circuit c = on_qubits(3);
    c.append(Gate::cmadd({}, {0, 1, 2}, 1, 8));
    CHECK(apply_to_basis(c, 7) == 0);  // wraparound
    CHECK(apply_to_basis(c, 3) == 4);
    const DenseUnitary u = to_unitary(c);
    // permutation matrix: one unit entry per column
    for (std::int64_t col = 0; col < 8; ++col) {
        int ones = 0;
        for (std::int64_t row = 0; row < 8; ++row) {
            if (std::abs(u.at(row, col)) > 0.5) ++ones;
            CHECK((std::abs(u.at(row, col)) < 1e-15 || std::abs(u.at(row, col) - Amplitude{1.0, 0.0}) < 1e-15));
        }
        CHECK(ones == 1);
    }

    SUBCASE("inverse adder subtracts") {
        const Circuit inv = inverse(c);
        REQUIRE(inv.gates.size() == 1);
        CHECK(inv.gates[0].addend == 7);  // -1 mod 8
        for (std::uint64_t x = 0; x < 8; ++x) {
            CHECK(apply_to_basis(inv, apply_to_basis(c, x)) == x);
        }
    }
    SUBCASE("controls gate the permutation") {
        Circuit cc = on_qubits(4);
        cc.append(Gate::cmadd({ControlBit{0, true}}, {1, 2, 3}, 3, 8));
        CHECK(apply_to_basis(cc, 0b0101) == 0b0101);  // control off
        CHECK(apply_to_basis(cc, 0b1101) == 0b1000);  // 5 + 3 = 0 mod 8
    }
    SUBCASE("partial-field adder only touches its register") {
        Circuit cf = on_qubits(4);
        cf.append(Gate::cmadd({}, {1, 2}, 1, 4));  // middle two bits
        CHECK(apply_to_basis(cf, 0b0110) == 0b0000u * 8 + 0b0000);  // 11 -> 00 in the field
        CHECK(apply_to_basis(cf, 0b1011) == 0b1101);
    }
}

TEST_CASE("multi-controlled X against the truth table") {
    for (int qubits = 2; qubits <= 8; ++qubits) {
        SplitMix64 rng(static_cast<std::uint64_t>(qubits) * 77);
        for (int trial = 0; trial < 10; ++trial) {
            const int target = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(qubits)));
            std::vector<ControlBit> controls;
            for (int q = 0; q < qubits; ++q) {
                if (q == target || rng.next_below(2)) continue;
                controls.push_back(ControlBit{q, rng.next_below(2) == 0});
            }
            Circuit c = on_qubits(qubits);
            c.append(Gate::mcx(controls, target));
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << qubits); ++x) {
                bool fires = true;
                for (const ControlBit& cb : controls) {
                    const bool bit = (x >> (qubits - 1 - cb.qubit)) & 1;
                    fires = fires && (bit == cb.positive);
                }
                const std::uint64_t expected =
                    fires ? x ^ (std::uint64_t{1} << (qubits - 1 - target)) : x;
                CHECK(apply_to_basis(c, x) == expected);
            }
        }
    }
}

TEST_CASE("value-keyed rotations") {
    // two control qubits select the angle; target is qubit 2
    Circuit c = on_qubits(3);
    const double theta = 2.0 * std::acos(0.5);
    c.append(Gate::crotx({0, 1}, {{2, theta}}, 2));
    const DenseUnitary u = to_unitary(c);
    // control value 2 = basis states 100 and 101
    CHECK(u.at(4, 4).real() == doctest::Approx(0.5));
    CHECK(u.at(5, 4).imag() == doctest::Approx(-std::sin(theta / 2.0)));
    // other control values untouched
    CHECK(u.at(0, 0) == Amplitude{1.0, 0.0});
    CHECK(u.at(3, 3) == Amplitude{1.0, 0.0});
    CHECK(unitarity_defect(u) < 1e-12);

    SUBCASE("angle zero is the identity branch") {
        Circuit id = on_qubits(1);
        id.append(Gate::crotx({}, {{0, 0.0}}, 0));
        const DenseUnitary ui = to_unitary(id);
        CHECK(std::abs(ui.at(0, 0) - Amplitude{1.0, 0.0}) < 1e-15);
        CHECK(std::abs(ui.at(1, 0)) < 1e-15);
    }
}

TEST_CASE("random circuits stay unitary and invert exactly") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Circuit c = random_circuit(5, 24, seed);
        const DenseUnitary u = to_unitary(c);
        CHECK(unitarity_defect(u) < 1e-10);

        Circuit round_trip = c;
        round_trip.extend(inverse(c));
        const DenseUnitary ui = to_unitary(round_trip);
        Circuit empty = on_qubits(5);
        CHECK(max_diff(ui, to_unitary(empty)) < 1e-10);
    }
}

TEST_CASE("norm preservation on a random state") {
    const Circuit c = random_circuit(6, 30, 99);
    SplitMix64 rng(5);
    State s(64);
    double nrm = 0.0;
    for (auto& a : s) {
        a = Amplitude{rng.next_gaussian(), rng.next_gaussian()};
        nrm += std::norm(a);
    }
    for (auto& a : s) a /= std::sqrt(nrm);
    const State out = apply_to_state(c, s);
    double out_nrm = 0.0;
    for (const auto& a : out) out_nrm += std::norm(a);
    CHECK(out_nrm == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(apply_to_state(c, State(32)), std::domain_error);
}

TEST_CASE("gate counts and inverse bookkeeping") {
    Circuit c = on_qubits(3);
    c.append(Gate::h(0));
    c.append(Gate::h(1));
    c.append(Gate::x(2));
    c.append(Gate::mcx({ControlBit{0, false}}, 2));
    c.append(Gate::cmadd({}, {1, 2}, 1, 4));
    const auto counts = gate_counts(c);
    CHECK(counts.at("h") == 2);
    CHECK(counts.at("x") == 1);
    CHECK(counts.at("mcx") == 1);
    CHECK(counts.at("cmadd") == 1);
    CHECK(gate_counts(inverse(c)) == counts);
}

TEST_CASE("serialization round trip and golden form") {
    Circuit c;
    c.layout.registers = {{"flag", 1}, {"value", 2}};
    c.append(Gate::h(0));
    c.append(Gate::mcx({ControlBit{1, true}, ControlBit{2, false}}, 0));
    c.append(Gate::crotx({1, 2}, {{1, 0.5}, {3, 2.0}}, 0));
    c.append(Gate::cmadd({ControlBit{0, true}}, {1, 2}, -1, 4));

    const std::string text = serialize(c);
    const std::string golden =
        "circuit v1\n"
        "qubits 3\n"
        "reg flag 1\n"
        "reg value 2\n"
        "h t0\n"
        "mcx +1 -2 t0\n"
        "crotx reg=1,2 t0 table=1:0.5;3:2\n"
        "cmadd reg=1,2 add=3 mod=4 +0\n"
        "end\n";
    CHECK(text == golden);

    const Circuit back = parse_circuit(text);
    CHECK(serialize(back) == text);
    CHECK(max_diff(to_unitary(back), to_unitary(c)) < 1e-15);

    CHECK_THROWS(parse_circuit("circuit v1\nqubits 1\nreg q 1\nbogus t0\nend\n"));
}

TEST_CASE("dense realization guard") {
    Circuit big = on_qubits(13);
    big.append(Gate::x(0));
    try {
        to_unitary(big);
        FAIL("expected the qubit guard to refuse");
    } catch (const std::domain_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("guard of 12") != std::string::npos);
        CHECK(msg.find("13") != std::string::npos);
    }

    SUBCASE("environment override moves the budget both ways") {
        setenv("FRACFLOW_QUBIT_GUARD", "13", 1);
        CHECK(dense_unitary_qubit_guard() == 13);
        setenv("FRACFLOW_QUBIT_GUARD", "3", 1);
        Circuit small = on_qubits(4);
        small.append(Gate::h(1));
        CHECK_THROWS_AS(to_unitary(small), std::domain_error);
        unsetenv("FRACFLOW_QUBIT_GUARD");
        CHECK(dense_unitary_qubit_guard() == 12);
        CHECK(to_unitary(small).dim() == 16);
    }
}

TEST_CASE("validation rejects malformed gates") {
    Circuit c = on_qubits(2);
    c.append(Gate::mcx({ControlBit{0, true}}, 0));  // control equals target
    CHECK_THROWS_AS(c.validate(), std::domain_error);
    Circuit d = on_qubits(2);
    d.append(Gate::x(5));
    CHECK_THROWS_AS(d.validate(), std::domain_error);
    CHECK_THROWS_AS(Gate::cmadd({}, {0, 1}, 1, 0), std::domain_error);
}
