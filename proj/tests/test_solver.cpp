#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fracflow/random.hpp"
#include "fracflow/solver.hpp"
#include "fracflow/spectral.hpp"

using namespace fracflow;

namespace {

struct Instance {
    CoefficientField field;
    SparseOperator G;
};

Instance pitchfork_instance(int ell, int F, double beta, double k_bg) {
    const GridSpec g = GridSpec::from_level(ell, 1.0);
    Instance inst{rasterize(pitchfork3d(g, F, beta, k_bg), g), {}};
    inst.G = assemble_G(inst.field, g, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
    return inst;
}

}  // namespace

TEST_CASE("cg solves the identity in one iteration") {
    const GridSpec g = GridSpec::from_level(1, 1.0);
    SparseOperator I;
    I.n = g.n;
    I.N = g.N;
    I.diag.assign(8, 1.0);
    I.band_z.assign(8, 0.0);
    I.band_y.assign(8, 0.0);
    I.band_x.assign(8, 0.0);
    const std::vector<double> b = {1, -2, 3, 0, 0.5, 0, 0, 4};
    const SolveResult r = cg_solve(I, b, 1e-12, 10, PrecondKind::None);
    CHECK(r.iterations == 1);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(r.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("cg matches dense solves") {
    SUBCASE("8x8 constant field, unit source") {
        const GridSpec g = GridSpec::from_level(1, 2.0);
        const CoefficientField f = constant_field(g, 1.0);
        const SparseOperator G =
            assemble_G(f, g, InterfaceRule::Harmonic, BoundaryMode::ghost_dirichlet());
        const std::vector<double> b = build_source(g, {{0, 1.0}});
        const SolveResult r = cg_solve(G, b, 1e-12, 1000, PrecondKind::None);
        const Eigen::MatrixXd dense = densify(G);
        Eigen::VectorXd be = Eigen::VectorXd::Zero(g.N);
        be(0) = 1.0;
        const Eigen::VectorXd xe = dense.ldlt().solve(be);
        for (std::int64_t i = 0; i < g.N; ++i) {
            CHECK(r.x[static_cast<std::size_t>(i)] == doctest::Approx(xe(i)).epsilon(1e-10));
        }
    }
    SUBCASE("heterogeneous instances up to N = 512") {
        for (auto& inst : {pitchfork_instance(2, 2, 1.3, 0.02), pitchfork_instance(3, 3, 0.8, 1e-3)}) {
            const std::vector<double> b = random_source(inst.field.grid, 6, 11);
            const SolveResult r = cg_solve(inst.G, b, 1e-12, 20000, PrecondKind::Jacobi);
            const Eigen::MatrixXd dense = densify(inst.G);
            Eigen::VectorXd be(inst.G.N);
            for (std::int64_t i = 0; i < inst.G.N; ++i) be(i) = b[static_cast<std::size_t>(i)];
            const Eigen::VectorXd xe = dense.ldlt().solve(be);
            double num = 0.0, den = 0.0;
            for (std::int64_t i = 0; i < inst.G.N; ++i) {
                num += std::pow(r.x[static_cast<std::size_t>(i)] - xe(i), 2);
                den += xe(i) * xe(i);
            }
            CHECK(std::sqrt(num / den) < 1e-8);
        }
    }
}

TEST_CASE("residual contract holds on success") {
    auto inst = pitchfork_instance(2, 2, 1.1, 0.05);
    const std::vector<double> b = random_source(inst.field.grid, 4, 3);
    const double tol = 1e-9;
    const SolveResult r = cg_solve(inst.G, b, tol, 20000, PrecondKind::None);
    const std::vector<double> Gx = inst.G.apply(r.x);
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        rn += std::pow(Gx[i] - b[i], 2);
        bn += b[i] * b[i];
    }
    CHECK(std::sqrt(rn / bn) <= tol);
    CHECK(r.relative_residual <= tol);
}

TEST_CASE("preconditioners agree and help") {
    // high contrast so Jacobi has something to fix
    auto inst = pitchfork_instance(3, 3, 2.5, 1e-4);
    const std::vector<double> b = random_source(inst.field.grid, 8, 17);
    const SolveResult plain = cg_solve(inst.G, b, 1e-10, 100000, PrecondKind::None);
    const SolveResult jacobi = cg_solve(inst.G, b, 1e-10, 100000, PrecondKind::Jacobi);
    const SolveResult lap = cg_solve(inst.G, b, 1e-10, 100000, PrecondKind::InverseLaplacian);
    CHECK(jacobi.preconditioner == "jacobi");

    double diff = 0.0, den = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        diff += std::pow(plain.x[i] - jacobi.x[i], 2);
        den += plain.x[i] * plain.x[i];
    }
    CHECK(std::sqrt(diff / den) < 1e-7);
    CHECK(jacobi.iterations < plain.iterations);
    CHECK(lap.iterations < plain.iterations);
}

TEST_CASE("iteration budget failure carries the best iterate") {
    auto inst = pitchfork_instance(2, 2, 1.3, 0.01);
    const std::vector<double> b = random_source(inst.field.grid, 4, 5);
    try {
        cg_solve(inst.G, b, 1e-12, 2, PrecondKind::None);
        FAIL("expected SolveFailure");
    } catch (const SolveFailure& e) {
        CHECK(e.best_iterate.size() == b.size());
        CHECK(e.relative_residual > 1e-12);
    }
    CHECK_THROWS_AS(cg_solve(inst.G, std::vector<double>(b.size(), 0.0), 1e-10, 10,
                             PrecondKind::None),
                    std::domain_error);
}

TEST_CASE("epsilon metric") {
    CHECK(epsilon_metric({0.0, 1.0, 0.0}, 1e-12) == doctest::Approx(1.0));
    CHECK(epsilon_metric({3.0, 4.0, 0.0}, 1e-12) == doctest::Approx(0.6));
    SUBCASE("scale invariance") {
        const std::vector<double> x = {0.3, -2.0, 5e-4, 0.0, 1.7};
        const double base = epsilon_metric(x, 1e-12);
        std::vector<double> scaled = x;
        for (double& v : scaled) v *= -437.25;
        CHECK(epsilon_metric(scaled, 1e-12) == doctest::Approx(base).epsilon(1e-14));
    }
    SUBCASE("degenerate inputs") {
        CHECK_THROWS_AS(epsilon_metric({0.0, 0.0}, 1e-12), std::domain_error);
        CHECK_THROWS_AS(epsilon_metric({1.0, 0.5}, 2.0), std::domain_error);
    }
    SUBCASE("matches a brute-force scan of a dense solve at N = 512") {
        auto inst = pitchfork_instance(3, 2, 1.0, 0.01);
        const std::vector<double> b = random_source(inst.field.grid, 20, 7);
        const Eigen::MatrixXd dense = densify(inst.G);
        Eigen::VectorXd be(inst.G.N);
        for (std::int64_t i = 0; i < inst.G.N; ++i) be(i) = b[static_cast<std::size_t>(i)];
        const Eigen::VectorXd xe = dense.ldlt().solve(be);
        const double nrm = xe.norm();
        double smallest = std::numeric_limits<double>::infinity();
        for (std::int64_t i = 0; i < inst.G.N; ++i) {
            if (std::abs(xe(i)) > 1e-12 * nrm) smallest = std::min(smallest, std::abs(xe(i)));
        }
        std::vector<double> x(xe.data(), xe.data() + xe.size());
        CHECK(epsilon_metric(x, 1e-12) == doctest::Approx(smallest / nrm).epsilon(1e-12));
    }
}
