#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ensplace/kernels.hpp"
#include "kernel_bodies.hpp"

namespace ensplace::kernels::serial {

void placement_products(const PlacementProductArgs& args, std::span<LogProduct> out) {
    detail::check_placement_args(args, out.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = detail::placement_entry(args, n);
}

void phi_matrix(std::span<const double> a, std::span<const double> abs_b, RealMatrix& out) {
    const std::size_t N = a.size();
    out = RealMatrix(N, N);
    for (std::size_t i = 0; i < N; ++i) detail::phi_row(a, abs_b, i, out.row(i));
}

double decay_violation(const RealMatrix& phi, double C, double mu) {
    double worst = -INFINITY;
    for (std::size_t i = 0; i < phi.rows(); ++i) worst = std::max(worst, detail::decay_row(phi, i, C, mu));
    return worst;
}

RealMatrix matmul(const RealMatrix& x, const RealMatrix& y) {
    detail::check_matmul(x, y);
    RealMatrix z(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) detail::matmul_row(x, y, i, z.row(i));
    return z;
}

ComplexMatrix matmul(const ComplexMatrix& x, const ComplexMatrix& y) {
    detail::check_matmul(x, y);
    ComplexMatrix z(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) detail::matmul_row(x, y, i, z.row(i));
    return z;
}

void h_samples(std::span<const double> a, std::span<const cplx> kb, std::span<const cplx> z, std::span<cplx> out) {
    if (z.size() != out.size()) throw std::invalid_argument("h_samples: output size mismatch");
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = detail::h_value(a, kb, z[j]);
}

}  // namespace ensplace::kernels::serial
