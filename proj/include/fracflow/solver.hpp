#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracflow/operator.hpp"

namespace fracflow {

/// A square operator exposed as a pure matvec.
struct LinOp {
    std::int64_t dim = 0;
    std::function<void(const double* x, double* y)> apply;
};

LinOp as_linop(const SparseOperator& op);

struct SolveFailure : std::runtime_error {
    SolveFailure(const std::string& what, std::vector<double> best, double residual)
        : std::runtime_error(what), best_iterate(std::move(best)), relative_residual(residual) {}
    std::vector<double> best_iterate;
    double relative_residual;
};

struct CgOutcome {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Plain preconditioned conjugate gradient on a LinOp; `precond` may be null.
/// Starts from the zero vector. Throws SolveFailure on indefiniteness.
CgOutcome pcg(const LinOp& A, const std::vector<double>& b, double tol, int max_iter,
              const LinOp* precond);

enum class PrecondKind { None, Jacobi, InverseLaplacian };

const char* to_string(PrecondKind p);

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    std::string preconditioner;
};

/// Classical solution oracle. Throws SolveFailure (with the best iterate)
/// when max_iter is exhausted before the residual contract is met.
SolveResult cg_solve(const SparseOperator& G, const std::vector<double>& b, double tol,
                     int max_iter, PrecondKind precond);

/// Smallest significant relative magnitude of x: min over |x_i| > zero_tol*||x||
/// of |x_i| / ||x||. zero_tol separates numerical zeros from small physical
/// values; it defaults to 1e-12 at call sites.
double epsilon_metric(const std::vector<double>& x, double zero_tol);

}  // namespace fracflow
