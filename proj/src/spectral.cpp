#include "fracflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fracflow/random.hpp"

namespace fracflow {

namespace {

std::vector<double> random_unit(std::int64_t dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> v(static_cast<std::size_t>(dim));
    double nrm2 = 0.0;
    for (double& x : v) {
        x = rng.next_gaussian();
        nrm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    for (double& x : v) x *= inv;
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

double spectral_norm(const LinOp& A, double tol, int max_iter, std::uint64_t seed) {
    std::vector<double> v = random_unit(A.dim, seed);
    std::vector<double> w(v.size());
    double estimate = 0.0;
    double residual = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        A.apply(v.data(), w.data());
        estimate = dot(v, w);  // Rayleigh quotient, |estimate| -> ||A|| for symmetric A
        double res2 = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = w[i] - estimate * v[i];
            res2 += d * d;
        }
        const double wnorm = norm2(w);
        residual = wnorm > 0.0 ? std::sqrt(res2) / wnorm : 0.0;
        if (residual <= tol) return std::abs(estimate);
        if (wnorm == 0.0) return 0.0;  // A annihilates v
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / wnorm;
    }
    throw ConvergenceFailure("spectral_norm: no convergence after " + std::to_string(max_iter) +
                                 " iterations (estimate " + std::to_string(std::abs(estimate)) +
                                 ", residual " + std::to_string(residual) + ")",
                             std::abs(estimate), residual);
}

double min_eig_spd(const LinOp& A, double tol, int max_iter, std::uint64_t seed) {
    std::vector<double> v = random_unit(A.dim, seed);
    std::vector<double> w(v.size()), Av(v.size());
    double estimate = 0.0;
    double residual = 1.0;
    const double inner_tol = std::max(tol * 1e-2, 1e-14);
    const int inner_iter = static_cast<int>(std::min<std::int64_t>(10 * A.dim + 100, 200000));
    for (int it = 0; it < max_iter; ++it) {
        CgOutcome sol = pcg(A, v, inner_tol, inner_iter, nullptr);  // throws if not SPD
        const double wnorm = norm2(sol.x);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = sol.x[i] / wnorm;
        A.apply(v.data(), Av.data());
        estimate = dot(v, Av);
        double res2 = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = Av[i] - estimate * v[i];
            res2 += d * d;
        }
        residual = std::sqrt(res2) / std::abs(estimate);
        if (residual <= tol) return estimate;
    }
    throw ConvergenceFailure("min_eig_spd: no convergence after " + std::to_string(max_iter) +
                                 " iterations (estimate " + std::to_string(estimate) +
                                 ", residual " + std::to_string(residual) + ")",
                             estimate, residual);
}

std::string SpectralReport::to_json() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"N\": %lld, \"lambda_max\": %.17g, \"lambda_min\": %.17g, "
                  "\"spectral_norm\": %.17g, \"alpha\": %.17g, \"K\": %.17g, "
                  "\"kappa_eff\": %.17g, \"tol\": %.17g, \"max_iterations\": %d}",
                  static_cast<long long>(N), lambda_max, lambda_min, spectral_norm, alpha, K,
                  kappa_eff, tol, max_iterations);
    return buf;
}

SpectralReport condition_numbers(const ScaledOperator& scaled, double tol) {
    SpectralReport r;
    r.N = scaled.op.N;
    r.alpha = scaled.alpha;
    r.tol = tol;
    r.max_iterations =
        static_cast<int>(std::min<std::int64_t>(std::max<std::int64_t>(10 * scaled.op.N, 1000),
                                                1000000));
    const LinOp A = as_linop(scaled.op);  // G'
    const double lam_max_scaled = spectral_norm(A, tol, r.max_iterations, 0x5eed0001ULL);
    const double lam_min_scaled = min_eig_spd(A, tol, r.max_iterations, 0x5eed0002ULL);
    r.lambda_max = lam_max_scaled * scaled.alpha;
    r.lambda_min = lam_min_scaled * scaled.alpha;
    r.spectral_norm = r.lambda_max;
    r.K = r.lambda_max / r.lambda_min;
    r.kappa_eff = scaled.alpha / r.lambda_min;  // = 1 / lambda_min(G')
    return r;
}

PoincareReport poincare_check(const std::vector<const ScaledOperator*>& instances,
                              const std::vector<double>& k_mins, double tol) {
    if (instances.size() != k_mins.size() || instances.empty()) {
        throw std::domain_error("poincare_check: instance and k_min lists must match");
    }
    PoincareReport report;
    double lo = 0.0, hi = 0.0;
    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        const ScaledOperator& s = *instances[idx];
        const double lam_min =
            min_eig_spd(as_linop(s.op), tol, 20000, 0x9eed0000ULL + idx) * s.alpha;
        PoincareRow row;
        row.N = s.op.N;
        row.lambda_min = lam_min;
        row.k_min = k_mins[idx];
        row.implied_C2 = k_mins[idx] / lam_min;
        report.rows.push_back(row);
        lo = idx == 0 ? lam_min : std::min(lo, lam_min);
        hi = idx == 0 ? lam_min : std::max(hi, lam_min);
    }
    report.ratio = hi / lo;
    report.decay_flagged = report.rows.back().lambda_min < 0.5 * report.rows.front().lambda_min;
    return report;
}

std::string PrecondBoundReport::to_json() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"alpha_A\": %.17g, \"alpha_M\": %.17g, \"norm_A\": %.17g, "
                  "\"norm_M\": %.17g, \"norm_AinvMinv\": %.17g, \"kappa_composed\": %.17g, "
                  "\"K_A\": %.17g, \"slack\": %.17g}",
                  alpha_A, alpha_M, norm_A, norm_M, norm_AinvMinv, kappa_composed, K_A, slack);
    return buf;
}

double dense_spectral_norm(const Eigen::MatrixXd& A) {
    // largest singular value via the symmetric eigensolve of A^T A
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A,
                                                      Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

PrecondBoundReport precond_lower_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M,
                                       double alpha_A, double alpha_M) {
    if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows()) {
        throw std::domain_error("precond_lower_bound: need square matrices of equal size");
    }
    PrecondBoundReport r;
    r.alpha_A = alpha_A;
    r.alpha_M = alpha_M;
    r.norm_A = dense_spectral_norm(A);
    r.norm_M = dense_spectral_norm(M);
    const double slop = 1e-12;
    if (alpha_A < r.norm_A * (1.0 - slop)) {
        throw std::domain_error("precond_lower_bound: alpha_A below ||A||");
    }
    if (alpha_M < r.norm_M * (1.0 - slop)) {
        throw std::domain_error("precond_lower_bound: alpha_M below ||M||");
    }
    const Eigen::MatrixXd MA = M * A;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(MA);
    const Eigen::MatrixXd AinvMinv = lu.inverse();
    r.norm_AinvMinv = dense_spectral_norm(AinvMinv);
    r.kappa_composed = alpha_A * alpha_M * r.norm_AinvMinv;
    Eigen::PartialPivLU<Eigen::MatrixXd> luA(A);
    r.K_A = r.norm_A * dense_spectral_norm(luA.inverse());
    r.slack = r.kappa_composed - r.K_A;
    return r;
}

Eigen::MatrixXd densify(const SparseOperator& op) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(op.N, op.N);
    for (std::int64_t a = 0; a < op.N; ++a) {
        A(a, a) = op.diag[static_cast<std::size_t>(a)];
        for (Direction d : kDirections) {
            const std::int64_t b = a + direction_offset(d, op.n);
            if (b < 0 || b >= op.N) continue;
            A(a, b) = op.entry(a, b);
        }
    }
    return A;
}

Eigen::MatrixXd densify(const LinOp& op) {
    Eigen::MatrixXd A(op.dim, op.dim);
    std::vector<double> e(static_cast<std::size_t>(op.dim), 0.0);
    std::vector<double> col(static_cast<std::size_t>(op.dim));
    for (std::int64_t j = 0; j < op.dim; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        op.apply(e.data(), col.data());
        e[static_cast<std::size_t>(j)] = 0.0;
        for (std::int64_t i = 0; i < op.dim; ++i) A(i, j) = col[static_cast<std::size_t>(i)];
    }
    return A;
}

}  // namespace fracflow
