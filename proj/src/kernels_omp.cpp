#include <omp.h>

#include <cmath>
#include <vector>

#include "ensplace/kernels.hpp"
#include "kernel_bodies.hpp"

namespace ensplace::kernels::omp {

void placement_products(const PlacementProductArgs& args, std::span<LogProduct> out) {
    detail::check_placement_args(args, out.size());
    const auto N = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t n = 0; n < N; ++n) out[n] = detail::placement_entry(args, static_cast<std::size_t>(n));
}

void phi_matrix(std::span<const double> a, std::span<const double> abs_b, RealMatrix& out) {
    const std::size_t N = a.size();
    out = RealMatrix(N, N);
    const auto rows = static_cast<std::ptrdiff_t>(N);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i)
        detail::phi_row(a, abs_b, static_cast<std::size_t>(i), out.row(static_cast<std::size_t>(i)));
}

double decay_violation(const RealMatrix& phi, double C, double mu) {
    double worst = -INFINITY;
    const auto rows = static_cast<std::ptrdiff_t>(phi.rows());
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (std::ptrdiff_t i = 0; i < rows; ++i)
        worst = std::max(worst, detail::decay_row(phi, static_cast<std::size_t>(i), C, mu));
    return worst;
}

namespace {

template <typename T>
Matrix<T> matmul_impl(const Matrix<T>& x, const Matrix<T>& y) {
    detail::check_matmul(x, y);
    Matrix<T> z(x.rows(), y.cols());
    const auto rows = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i)
        detail::matmul_row(x, y, static_cast<std::size_t>(i), z.row(static_cast<std::size_t>(i)));
    return z;
}

}  // namespace

RealMatrix matmul(const RealMatrix& x, const RealMatrix& y) { return matmul_impl(x, y); }
ComplexMatrix matmul(const ComplexMatrix& x, const ComplexMatrix& y) { return matmul_impl(x, y); }

void h_samples(std::span<const double> a, std::span<const cplx> kb, std::span<const cplx> z, std::span<cplx> out) {
    if (z.size() != out.size()) throw std::invalid_argument("h_samples: output size mismatch");
    const auto count = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < count; ++j) out[j] = detail::h_value(a, kb, z[j]);
}

}  // namespace ensplace::kernels::omp
