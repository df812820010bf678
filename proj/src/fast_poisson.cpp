#include "fracflow/fast_poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace fracflow {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Orthogonal symmetric sine basis, S[a*n + k] = sqrt(2/(n+1)) sin((a+1)(k+1)pi/(n+1)).
std::vector<double> sine_basis(std::int64_t n) {
    std::vector<double> s(static_cast<std::size_t>(n * n));
    const double norm = std::sqrt(2.0 / static_cast<double>(n + 1));
    for (std::int64_t a = 0; a < n; ++a) {
        for (std::int64_t k = 0; k < n; ++k) {
            s[static_cast<std::size_t>(a * n + k)] =
                norm * std::sin(static_cast<double>((a + 1) * (k + 1)) * kPi /
                                static_cast<double>(n + 1));
        }
    }
    return s;
}

double axis_mode(std::int64_t k, std::int64_t n) {
    const double s = std::sin(static_cast<double>(k) * kPi / (2.0 * static_cast<double>(n + 1)));
    return s * s;
}

// y = S * x interpreted along one axis of a rank-d tensor; stride walks the
// chosen axis, `blocks` enumerates the remaining indices.
void transform_axis(const std::vector<double>& sine, std::int64_t n, double* data,
                    std::int64_t stride, std::int64_t outer, std::int64_t inner,
                    std::vector<double>& scratch) {
    for (std::int64_t o = 0; o < outer; ++o) {
        for (std::int64_t in = 0; in < inner; ++in) {
            double* base = data + o * stride * n + in;
            for (std::int64_t a = 0; a < n; ++a) {
                double acc = 0.0;
                const double* row = sine.data() + a * n;
                for (std::int64_t k = 0; k < n; ++k) acc += row[k] * base[k * stride];
                scratch[static_cast<std::size_t>(a)] = acc;
            }
            for (std::int64_t a = 0; a < n; ++a) base[a * stride] = scratch[static_cast<std::size_t>(a)];
        }
    }
}

}  // namespace

std::vector<double> laplacian_eigs_2d(std::int64_t n) {
    if (n < 1) throw std::domain_error("laplacian_eigs_2d: n must be at least 1");
    const double base = axis_mode(1, n);
    std::vector<double> eigs;
    eigs.reserve(static_cast<std::size_t>(n * n));
    for (std::int64_t kx = 1; kx <= n; ++kx) {
        for (std::int64_t ky = 1; ky <= n; ++ky) {
            eigs.push_back(-(axis_mode(kx, n) + axis_mode(ky, n)) / (2.0 * base));
        }
    }
    return eigs;
}

SineLaplacianInverse2D::SineLaplacianInverse2D(std::int64_t n) : n_(n) {
    if (n < 1) throw std::domain_error("SineLaplacianInverse2D: n must be at least 1");
    sine_ = sine_basis(n);
    const std::vector<double> eigs = laplacian_eigs_2d(n);
    inv_eigs_.resize(eigs.size());
    for (std::size_t i = 0; i < eigs.size(); ++i) inv_eigs_[i] = 1.0 / eigs[i];
}

void SineLaplacianInverse2D::apply(const double* x, double* y) const {
    const std::int64_t n = n_;
    std::vector<double> work(x, x + dim());
    std::vector<double> scratch(static_cast<std::size_t>(n));
    transform_axis(sine_, n, work.data(), n, 1, n, scratch);  // along p
    transform_axis(sine_, n, work.data(), 1, n, 1, scratch);  // along q
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= inv_eigs_[i];
    transform_axis(sine_, n, work.data(), n, 1, n, scratch);
    transform_axis(sine_, n, work.data(), 1, n, 1, scratch);
    for (std::int64_t i = 0; i < dim(); ++i) y[i] = work[static_cast<std::size_t>(i)];
}

std::vector<double> SineLaplacianInverse2D::apply(const std::vector<double>& x) const {
    if (static_cast<std::int64_t>(x.size()) != dim()) {
        throw std::domain_error("SineLaplacianInverse2D: dimension mismatch");
    }
    std::vector<double> y(x.size());
    apply(x.data(), y.data());
    return y;
}

SineLaplacianInverse3D::SineLaplacianInverse3D(std::int64_t n) : n_(n) {
    if (n < 1) throw std::domain_error("SineLaplacianInverse3D: n must be at least 1");
    sine_ = sine_basis(n);
    inv_eigs_.resize(static_cast<std::size_t>(n * n * n));
    min_eig_ = 12.0 * axis_mode(1, n);
    max_eig_ = 12.0 * axis_mode(n, n);
    std::size_t idx = 0;
    for (std::int64_t ki = 1; ki <= n; ++ki) {
        for (std::int64_t kj = 1; kj <= n; ++kj) {
            for (std::int64_t kk = 1; kk <= n; ++kk) {
                const double lambda =
                    4.0 * (axis_mode(ki, n) + axis_mode(kj, n) + axis_mode(kk, n));
                inv_eigs_[idx++] = 1.0 / lambda;
            }
        }
    }
}

void SineLaplacianInverse3D::apply(const double* x, double* y) const {
    const std::int64_t n = n_;
    std::vector<double> work(x, x + dim());
    std::vector<double> scratch(static_cast<std::size_t>(n));
    // cell (i, j, k) lives at i*n^2 + j*n + k
    transform_axis(sine_, n, work.data(), n * n, 1, n * n, scratch);
    transform_axis(sine_, n, work.data(), n, n, n, scratch);
    transform_axis(sine_, n, work.data(), 1, n * n, 1, scratch);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= inv_eigs_[i];
    transform_axis(sine_, n, work.data(), n * n, 1, n * n, scratch);
    transform_axis(sine_, n, work.data(), n, n, n, scratch);
    transform_axis(sine_, n, work.data(), 1, n * n, 1, scratch);
    for (std::int64_t i = 0; i < dim(); ++i) y[i] = work[static_cast<std::size_t>(i)];
}

}  // namespace fracflow
