#pragma once

#include <cstdint>
#include <vector>

namespace fracflow {

/// Eigenvalues of the 2D Dirichlet Laplacian on an n x n grid, rescaled so
/// the inverse has unit norm: lambda_{kx,ky} =
/// -(sin^2(kx pi/(2(n+1))) + sin^2(ky pi/(2(n+1)))) / (2 sin^2(pi/(2(n+1)))),
/// for kx, ky in 1..n, listed with kx outer and ky inner.
std::vector<double> laplacian_eigs_2d(std::int64_t n);

/// Applies the inverse of the rescaled 2D five-point Laplacian through its
/// sine eigenbasis; cell (p, q) maps to index p*n + q.
class SineLaplacianInverse2D {
  public:
    explicit SineLaplacianInverse2D(std::int64_t n);

    std::int64_t dim() const { return n_ * n_; }
    void apply(const double* x, double* y) const;
    std::vector<double> apply(const std::vector<double>& x) const;

  private:
    std::int64_t n_;
    std::vector<double> sine_;      // n x n symmetric orthogonal sine basis
    std::vector<double> inv_eigs_;  // 1/lambda_{kx,ky}
};

/// Inverse of the positive 3D seven-point Laplacian (diagonal 6, off-diagonal
/// -1) on an n^3 grid via the sine eigenbasis. Unnormalized; the analytic
/// extreme eigenvalues are exposed so callers can pick their own scaling.
class SineLaplacianInverse3D {
  public:
    explicit SineLaplacianInverse3D(std::int64_t n);

    std::int64_t dim() const { return n_ * n_ * n_; }
    void apply(const double* x, double* y) const;

    double min_eig() const { return min_eig_; }
    double max_eig() const { return max_eig_; }

  private:
    std::int64_t n_;
    std::vector<double> sine_;
    std::vector<double> inv_eigs_;  // over the n^3 modes
    double min_eig_ = 0.0;
    double max_eig_ = 0.0;
};

}  // namespace fracflow
