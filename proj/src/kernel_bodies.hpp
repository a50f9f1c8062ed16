#pragma once

// Per-element bodies shared by the serial and OpenMP kernels. Only the
// outer loop differs between the two translation units.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ensplace/kernels.hpp"

namespace ensplace::kernels::detail {

inline void check_placement_args(const PlacementProductArgs& args, std::size_t entries) {
    if (args.a.size() < args.M || args.lambda.size() < args.M)
        throw std::invalid_argument("placement_products: data shorter than M");
    if (args.log_offset.size() != entries) throw std::invalid_argument("placement_products: offset size mismatch");
    if (entries > args.M) throw std::invalid_argument("placement_products: more entries than M");
}

inline LogProduct placement_entry(const PlacementProductArgs& args, std::size_t n) {
    LogProduct p;
    const double an = args.a[n];
    double log_abs = args.log_offset[n];
    double arg = 0.0;
    for (std::size_t m = 0; m < args.M; ++m) {
        if (m == n) continue;
        const cplx num = 1.0 - args.lambda[m] / an;
        const double den = 1.0 - args.a[m] / an;
        log_abs += std::log(std::abs(num)) - std::log(std::abs(den));
        arg += std::arg(num);
        if (den < 0.0) arg -= std::numbers::pi;
        if (!p.tripped && log_abs > args.guard) {
            p.tripped = true;
            p.trip_index = m + 1;
            p.trip_log_abs = log_abs;
        }
    }
    p.log_abs = log_abs;
    p.arg = arg;
    return p;
}

inline void phi_row(std::span<const double> a, std::span<const double> abs_b, std::size_t i, std::span<double> row) {
    for (std::size_t j = 0; j < a.size(); ++j) row[j] = (abs_b[i] / abs_b[j]) / (1.0 + a[i] / a[j]);
}

inline double decay_row(const RealMatrix& phi, std::size_t i, double C, double mu) {
    double worst = -INFINITY;
    for (std::size_t j = 0; j < phi.cols(); ++j) {
        const auto gap = static_cast<double>(i > j ? i - j : j - i);
        worst = std::max(worst, phi(i, j) - C * std::pow(mu, gap));
    }
    return worst;
}

template <typename T>
void check_matmul(const Matrix<T>& x, const Matrix<T>& y) {
    if (x.cols() != y.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
}

template <typename T>
void matmul_row(const Matrix<T>& x, const Matrix<T>& y, std::size_t i, std::span<T> out) {
    std::fill(out.begin(), out.end(), T{});
    for (std::size_t k = 0; k < x.cols(); ++k) {
        const T xik = x(i, k);
        auto yrow = y.row(k);
        for (std::size_t j = 0; j < y.cols(); ++j) out[j] += xik * yrow[j];
    }
}

inline cplx h_value(std::span<const double> a, std::span<const cplx> kb, cplx z) {
    cplx acc{1.0, 0.0};
    for (std::size_t n = 0; n < a.size(); ++n) acc += kb[n] / (a[n] - z);
    return acc;
}

}  // namespace ensplace::kernels::detail
