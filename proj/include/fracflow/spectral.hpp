#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracflow/fast_poisson.hpp"
#include "fracflow/operator.hpp"
#include "fracflow/solver.hpp"

namespace fracflow {

struct ConvergenceFailure : std::runtime_error {
    ConvergenceFailure(const std::string& what, double estimate, double residual)
        : std::runtime_error(what), best_estimate(estimate), relative_residual(residual) {}
    double best_estimate;
    double relative_residual;
};

/// Power-iteration estimate of the spectral norm of a symmetric operator,
/// with relative eigen-residual below tol. Deterministic under seed.
double spectral_norm(const LinOp& A, double tol, int max_iter, std::uint64_t seed);

/// Smallest eigenvalue of an SPD operator by inverse iteration with an inner
/// CG solve. CG breakdown signals a non-SPD input.
double min_eig_spd(const LinOp& A, double tol, int max_iter, std::uint64_t seed);

struct SpectralReport {
    std::int64_t N = 0;
    double lambda_max = 0.0;   // of G
    double lambda_min = 0.0;   // of G
    double spectral_norm = 0.0;
    double alpha = 0.0;
    double K = 0.0;            // ||G|| * ||G^-1||
    double kappa_eff = 0.0;    // alpha * ||G^-1|| = ||(G')^-1||
    double tol = 0.0;
    int max_iterations = 0;

    std::string to_json() const;
};

SpectralReport condition_numbers(const ScaledOperator& scaled, double tol);

struct PoincareRow {
    std::int64_t N = 0;
    double lambda_min = 0.0;
    double k_min = 0.0;
    double implied_C2 = 0.0;  // k_min / lambda_min
};

struct PoincareReport {
    std::vector<PoincareRow> rows;
    double ratio = 0.0;        // max over min of lambda_min across the sweep
    bool decay_flagged = false;  // set when lambda_min falls below half its first value
};

/// Instances must refine one physical domain (fixed L). k_min is per instance.
PoincareReport poincare_check(const std::vector<const ScaledOperator*>& instances,
                              const std::vector<double>& k_mins, double tol);

struct PrecondBoundReport {
    double alpha_A = 0.0;
    double alpha_M = 0.0;
    double norm_A = 0.0;
    double norm_M = 0.0;
    double norm_AinvMinv = 0.0;
    double kappa_composed = 0.0;  // alpha_A * alpha_M * ||A^-1 M^-1||
    double K_A = 0.0;
    double slack = 0.0;           // kappa_composed - K_A

    std::string to_json() const;
};

/// Dense verification of the separate-block-encoding lower bound
/// kappa_composed >= K(A). Throws when a subnormalization sits below the
/// corresponding operator norm.
PrecondBoundReport precond_lower_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M,
                                       double alpha_A, double alpha_M);

/// Dense helpers used by oracles and the bound verifier.
double dense_spectral_norm(const Eigen::MatrixXd& A);
Eigen::MatrixXd densify(const SparseOperator& op);
Eigen::MatrixXd densify(const LinOp& op);

}  // namespace fracflow
