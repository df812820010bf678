#include "fracflow/solver.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "fracflow/fast_poisson.hpp"

namespace fracflow {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

LinOp as_linop(const SparseOperator& op) {
    return LinOp{op.N, [&op](const double* x, double* y) { op.matvec(x, y); }};
}

CgOutcome pcg(const LinOp& A, const std::vector<double>& b, double tol, int max_iter,
              const LinOp* precond) {
    const std::size_t n = b.size();
    CgOutcome out;
    out.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }

    std::vector<double> r = b;  // residual for x = 0
    std::vector<double> z(n), p(n), Ap(n);
    if (precond) {
        precond->apply(r.data(), z.data());
    } else {
        z = r;
    }
    p = z;
    double rz = dot(r, z);
    double res = norm2(r) / bnorm;

    for (int it = 0; it < max_iter && res > tol; ++it) {
        A.apply(p.data(), Ap.data());
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) {
            throw SolveFailure("cg: curvature p'Ap <= 0, matrix is not positive definite",
                               out.x, res);
        }
        const double alpha = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        if (precond) {
            precond->apply(r.data(), z.data());
        } else {
            z = r;
        }
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        res = norm2(r) / bnorm;
        out.iterations = it + 1;
    }
    out.relative_residual = res;
    out.converged = res <= tol;
    return out;
}

const char* to_string(PrecondKind p) {
    switch (p) {
        case PrecondKind::None: return "none";
        case PrecondKind::Jacobi: return "jacobi";
        case PrecondKind::InverseLaplacian: return "inverse_laplacian";
    }
    return "?";
}

SolveResult cg_solve(const SparseOperator& G, const std::vector<double>& b, double tol,
                     int max_iter, PrecondKind precond) {
    if (static_cast<std::int64_t>(b.size()) != G.N) {
        throw std::domain_error("cg_solve: dimension mismatch");
    }
    if (norm2(b) == 0.0) {
        throw std::domain_error("cg_solve: right-hand side is zero");
    }

    LinOp A = as_linop(G);
    LinOp M;
    std::vector<double> inv_diag;
    SineLaplacianInverse3D* lap = nullptr;
    std::unique_ptr<SineLaplacianInverse3D> lap_storage;
    switch (precond) {
        case PrecondKind::None: break;
        case PrecondKind::Jacobi: {
            inv_diag.resize(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) inv_diag[i] = 1.0 / G.diag[i];
            M.dim = G.N;
            M.apply = [&inv_diag](const double* x, double* y) {
                for (std::size_t i = 0; i < inv_diag.size(); ++i) y[i] = inv_diag[i] * x[i];
            };
            break;
        }
        case PrecondKind::InverseLaplacian: {
            lap_storage = std::make_unique<SineLaplacianInverse3D>(G.n);
            lap = lap_storage.get();
            M.dim = G.N;
            M.apply = [lap](const double* x, double* y) { lap->apply(x, y); };
            break;
        }
    }

    CgOutcome out = pcg(A, b, tol, max_iter, precond == PrecondKind::None ? nullptr : &M);
    if (!out.converged) {
        throw SolveFailure("cg_solve: no convergence after " + std::to_string(max_iter) +
                               " iterations, residual " + std::to_string(out.relative_residual),
                           std::move(out.x), out.relative_residual);
    }
    SolveResult result;
    result.x = std::move(out.x);
    result.iterations = out.iterations;
    result.relative_residual = out.relative_residual;
    result.preconditioner = to_string(precond);
    return result;
}

double epsilon_metric(const std::vector<double>& x, double zero_tol) {
    const double nrm = norm2(x);
    if (nrm == 0.0) {
        throw std::domain_error("epsilon_metric: zero vector");
    }
    double best = -1.0;
    for (double v : x) {
        const double mag = std::abs(v);
        if (mag > zero_tol * nrm && (best < 0.0 || mag < best)) best = mag;
    }
    if (best < 0.0) {
        throw std::domain_error("epsilon_metric: all entries below the zero threshold");
    }
    return best / nrm;
}

}  // namespace fracflow
