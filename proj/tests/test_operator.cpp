#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <set>

#include "fracflow/operator.hpp"
#include "fracflow/random.hpp"
#include "fracflow/spectral.hpp"

using namespace fracflow;

namespace {

std::vector<CoefficientField> desk_instances() {
    std::vector<CoefficientField> out;
    out.push_back(constant_field(GridSpec::from_level(1, 2.0), 1.0));
    out.push_back(constant_field(GridSpec::from_level(2, 1.0), 3.5));
    {
        const GridSpec g = GridSpec::from_level(2, 1.0);
        out.push_back(rasterize(pitchfork3d(g, 2, 1.4, 0.01), g));
    }
    {
        const GridSpec g = GridSpec::from_level(3, 1.0);
        out.push_back(rasterize(pitchfork3d(g, 3, 0.9, 1e-3), g));
    }
    return out;
}

}  // namespace

TEST_CASE("constant coefficients reduce to the Laplacian stencil") {
    const GridSpec g = GridSpec::from_level(1, 2.0);  // dx = 1
    const CoefficientField f = constant_field(g, 1.0);
    const SparseOperator G =
        assemble_G(f, g, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
    const SparseOperator lap = laplacian3d(g);

    for (std::int64_t a = 0; a < g.N; ++a) {
        for (std::int64_t b = 0; b < g.N; ++b) {
            CHECK(G.entry(a, b) == doctest::Approx(lap.entry(a, b)).epsilon(1e-15));
        }
    }

    // dense eigensolve oracle: the 8x8 zero-Dirichlet Laplacian has extreme
    // eigenvalues 3 and 9
    const Eigen::MatrixXd dense = densify(G);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(9.0).epsilon(1e-12));

    SUBCASE("the k/dx^2 prefactor at non-unit spacing") {
        const GridSpec g2 = GridSpec::from_level(2, 1.0);  // dx = 1/4
        const double k = 2.5;
        const SparseOperator Gk = assemble_G(constant_field(g2, k), g2, InterfaceRule::Geometric,
                                             BoundaryMode::ghost_dirichlet());
        const SparseOperator lap2 = laplacian3d(g2);
        const double factor = k / (g2.dx * g2.dx);
        for (std::int64_t a = 0; a < g2.N; ++a) {
            CHECK(Gk.diag[static_cast<std::size_t>(a)] ==
                  doctest::Approx(factor * lap2.diag[static_cast<std::size_t>(a)]).epsilon(1e-14));
            for (Direction d : kDirections) {
                CHECK(Gk.entry_in_direction(a, d) ==
                      doctest::Approx(factor * lap2.entry_in_direction(a, d)).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("laplacian3d basics") {
    const GridSpec g = GridSpec::from_level(1, 1.0);
    const SparseOperator lap = laplacian3d(g);
    double trace = 0.0;
    for (double d : lap.diag) trace += d;
    CHECK(trace == doctest::Approx(6.0 * static_cast<double>(g.N)));
    // every corner row of the 2-grid keeps diagonal 6 with three off-diagonals
    for (std::int64_t a = 0; a < g.N; ++a) {
        double row_sum = lap.diag[static_cast<std::size_t>(a)];
        for (Direction d : kDirections) row_sum += lap.entry_in_direction(a, d);
        CHECK(row_sum == doctest::Approx(3.0));
    }
}

namespace {

// independent route: the six-flux balance evaluated directly from the field
// (ghost cells mirror the boundary permeability and carry h = 0)
std::vector<double> flux_balance_oracle(const CoefficientField& field, InterfaceRule rule,
                                        const std::vector<double>& h) {
    const GridSpec& g = field.grid;
    std::vector<double> out(static_cast<std::size_t>(g.N), 0.0);
    const double inv_dx2 = 1.0 / (g.dx * g.dx);
    for (std::int64_t a = 0; a < g.N; ++a) {
        const double ka = field.cell_k[static_cast<std::size_t>(a)];
        double acc = 0.0;
        for (const NeighborEntry& nb : neighbors(a, g.n)) {
            const double kb = nb.index ? field.cell_k[static_cast<std::size_t>(*nb.index)] : ka;
            const double k_face = interface_value(ka, kb, rule);
            const double h_b = nb.index ? h[static_cast<std::size_t>(*nb.index)] : 0.0;
            acc += k_face * (h_b - h[static_cast<std::size_t>(a)]) * inv_dx2;
        }
        out[static_cast<std::size_t>(a)] = -acc;  // overall sign flip makes G positive definite
    }
    return out;
}

}  // namespace

TEST_CASE("assembly matches the six-flux balance on random fields") {
    for (const CoefficientField& f : desk_instances()) {
        const SparseOperator G =
            assemble_G(f, f.grid, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
        SplitMix64 rng(42);
        std::vector<double> h(static_cast<std::size_t>(f.grid.N));
        for (double& v : h) v = rng.next_double() * 2.0 - 1.0;
        const std::vector<double> via_matrix = G.apply(h);
        const std::vector<double> via_balance = flux_balance_oracle(f, InterfaceRule::Harmonic, h);
        for (std::size_t i = 0; i < h.size(); ++i) {
            CHECK(via_matrix[i] == doctest::Approx(via_balance[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("hand-checked heterogeneous 8x8 assembly") {
    // one cell's permeability doubled; entries follow the interface means
    const GridSpec g = GridSpec::from_level(1, 2.0);  // dx = 1
    CoefficientField f = constant_field(g, 1.0);
    f.cell_k[7] = 2.0;  // cell (1,1,1)
    const SparseOperator G =
        assemble_G(f, g, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
    const double mixed = 2.0 * 1.0 * 2.0 / 3.0;  // harmonic mean of 1 and 2
    CHECK(G.entry(7, 6) == doctest::Approx(-mixed));
    CHECK(G.entry(7, 5) == doctest::Approx(-mixed));
    CHECK(G.entry(7, 3) == doctest::Approx(-mixed));
    CHECK(G.entry(7, 7) == doctest::Approx(3.0 * mixed + 3.0 * 2.0));  // three ghost faces at k=2
    CHECK(G.entry(0, 0) == doctest::Approx(6.0));
    CHECK(G.entry(6, 6) == doctest::Approx(2.0 + 3.0 + mixed));  // neighbors 7, 4, 2 + ghosts
    CHECK(G.entry(1, 0) == doctest::Approx(-1.0));
}

TEST_CASE("assembled operators are symmetric positive definite with the right structure") {
    for (const CoefficientField& f : desk_instances()) {
        const SparseOperator G =
            assemble_G(f, f.grid, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
        const Eigen::MatrixXd dense = densify(G);
        CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
        CHECK(es.eigenvalues().minCoeff() > 0.0);

        // row structure: nonzero off-diagonal columns are exactly the
        // in-domain neighbors
        for (std::int64_t a = 0; a < f.grid.N; ++a) {
            std::set<std::int64_t> expected;
            for (const auto& nb : neighbors(a, f.grid.n)) {
                if (nb.index) expected.insert(*nb.index);
            }
            std::set<std::int64_t> got;
            for (std::int64_t b = 0; b < f.grid.N; ++b) {
                if (b != a && dense(a, b) != 0.0) got.insert(b);
            }
            CHECK(got == expected);
            CHECK(got.size() <= 6);
        }
    }
}

TEST_CASE("identity row boundary mode") {
    const GridSpec g = GridSpec::from_level(1, 1.0);
    const CoefficientField f = constant_field(g, 1.0);
    const SparseOperator G =
        assemble_G(f, g, InterfaceRule::Harmonic, BoundaryMode::identity_rows({2, 7}));
    const Eigen::MatrixXd dense = densify(G);
    for (std::int64_t r : {2, 7}) {
        for (std::int64_t b = 0; b < g.N; ++b) {
            CHECK(dense(r, b) == (b == r ? 1.0 : 0.0));
            CHECK(dense(b, r) == (b == r ? 1.0 : 0.0));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK_THROWS_AS(
        assemble_G(f, g, InterfaceRule::Harmonic, BoundaryMode::identity_rows({99})),
        std::domain_error);
}

TEST_CASE("gershgorin subnormalization") {
    {
        const GridSpec g = GridSpec::from_level(1, 1.0);
        CHECK(gershgorin_alpha(constant_field(g, 1.0), g) == doctest::Approx(48.0));
    }
    {
        const GridSpec g = GridSpec::from_level(2, 4.0);  // dx = 1
        CHECK(gershgorin_alpha(constant_field(g, 1.0), g) == doctest::Approx(12.0));
    }
    for (const CoefficientField& f : desk_instances()) {
        const SparseOperator G =
            assemble_G(f, f.grid, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
        const double alpha = gershgorin_alpha(f, f.grid);
        const double norm = dense_spectral_norm(densify(G));
        CHECK(alpha >= norm);
    }
}

TEST_CASE("rescale") {
    const GridSpec g = GridSpec::from_level(2, 4.0);  // dx = 1
    const CoefficientField f = constant_field(g, 1.0);
    const SparseOperator G =
        assemble_G(f, g, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
    SUBCASE("alpha = 1 leaves entries unchanged") {
        // row-sum assertion would trip for the raw operator, so scale a copy
        const ScaledOperator s = rescale(G, gershgorin_alpha(f, g));
        const ScaledOperator identity_scaled = rescale(s.op, 1.0);
        CHECK(identity_scaled.op.diag == s.op.diag);
    }
    SUBCASE("unit-spacing constant field peaks at 0.5") {
        const ScaledOperator s = rescale(G, gershgorin_alpha(f, g));
        double max_abs = 0.0;
        for (std::int64_t a = 0; a < g.N; ++a)
            for (std::int64_t b = 0; b < g.N; ++b)
                max_abs = std::max(max_abs, std::abs(s.op.entry(a, b)));
        CHECK(max_abs == doctest::Approx(0.5));
        CHECK(dense_spectral_norm(densify(s.op)) <= 1.0 + 1e-12);
    }
    SUBCASE("norm of the scaled 8x8 constant case matches the dense value") {
        const GridSpec g2 = GridSpec::from_level(1, 2.0);
        const CoefficientField f2 = constant_field(g2, 1.0);
        const SparseOperator G2 =
            assemble_G(f2, g2, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
        const double alpha = gershgorin_alpha(f2, g2);
        const ScaledOperator s2 = rescale(G2, alpha);
        CHECK(dense_spectral_norm(densify(s2.op)) == doctest::Approx(9.0 / alpha));
    }
    SUBCASE("nonpositive alpha is rejected") {
        CHECK_THROWS_AS(rescale(G, 0.0), std::domain_error);
        CHECK_THROWS_AS(rescale(G, -2.0), std::domain_error);
    }
}

TEST_CASE("source vectors") {
    const GridSpec g = GridSpec::from_level(2, 1.0);
    SUBCASE("single site is a unit basis vector") {
        const std::vector<double> b = build_source(g, {{5, 1.0}});
        for (std::int64_t a = 0; a < g.N; ++a) CHECK(b[static_cast<std::size_t>(a)] == (a == 5 ? 1.0 : 0.0));
    }
    SUBCASE("duplicates are rejected") {
        CHECK_THROWS_AS(build_source(g, {{5, 1.0}, {5, -1.0}}), std::domain_error);
        CHECK_THROWS_AS(build_source(g, {{-1, 1.0}}), std::domain_error);
    }
    SUBCASE("random sites are reproducible and balanced") {
        const std::vector<double> b1 = random_source(g, 20, 7);
        const std::vector<double> b2 = random_source(g, 20, 7);
        CHECK(b1 == b2);
        double sum = 0.0;
        int support = 0;
        for (double v : b1) {
            sum += v;
            if (v != 0.0) ++support;
        }
        CHECK(support == 20);
        CHECK(sum == doctest::Approx(0.0));
        const std::vector<double> b3 = random_source(g, 20, 8);
        CHECK(b1 != b3);
    }
}

TEST_CASE("matrix market round trip") {
    const GridSpec g = GridSpec::from_level(2, 1.0);
    const CoefficientField f = rasterize(pitchfork3d(g, 2, 1.4, 0.01), g);
    const SparseOperator G =
        assemble_G(f, g, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
    const std::string path = "operator_roundtrip_test.mtx";
    write_matrix_market(G, path);

    {
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");
        std::int64_t rows = 0, cols = 0, nnz = 0;
        in >> rows >> cols >> nnz;
        CHECK(rows == g.N);
        CHECK(nnz == G.stored_nonzeros());
    }

    const SparseOperator back = read_matrix_market(path);
    CHECK(back.n == G.n);
    CHECK(back.diag == G.diag);
    CHECK(back.band_z == G.band_z);
    CHECK(back.band_y == G.band_y);
    CHECK(back.band_x == G.band_x);
    std::remove(path.c_str());

    SUBCASE("malformed input reports the line") {
        const std::string bad = "operator_bad_test.mtx";
        {
            std::ofstream out(bad);
            out << "%%MatrixMarket matrix coordinate real symmetric\n8 8 1\n1 1 not_a_number\n";
        }
        try {
            read_matrix_market(bad);
            FAIL("expected a parse error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        }
        std::remove(bad.c_str());
    }
}

TEST_CASE("vector csv round trip") {
    const std::vector<double> v = {1.0, -0.5, 3.25e-17, 7.0};
    const std::string path = "vector_roundtrip_test.csv";
    write_vector_csv(v, path);
    CHECK(read_vector_csv(path) == v);
    std::remove(path.c_str());
}
