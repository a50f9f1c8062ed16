#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with identical
// results: each output element is produced by exactly one thread with a
// fixed accumulation order, so the two agree bit for bit.

#include <cstddef>
#include <span>

#include "ensplace/matrix.hpp"

namespace ensplace::kernels {

/// Log-magnitude/phase form of
///   exp(log_offset_n) * prod_{m<M, m!=n} (1 - lambda_m/a_n) / (1 - a_m/a_n).
struct LogProduct {
    double log_abs = 0.0;
    double arg = 0.0;           // accumulated phase, not wrapped
    bool tripped = false;       // running log_abs exceeded the guard
    std::size_t trip_index = 0; // 1-based m at which the guard first tripped
    double trip_log_abs = 0.0;
};

struct PlacementProductArgs {
    std::span<const double> a;       // length >= M
    std::span<const cplx> lambda;    // length >= M
    std::span<const double> log_offset;  // length == out.size()
    std::size_t M = 0;
    double guard = 700.0;
};

namespace serial {

void placement_products(const PlacementProductArgs& args, std::span<LogProduct> out);

/// phi_ij = |b_i / b_j| / (1 + a_i / a_j)
void phi_matrix(std::span<const double> a, std::span<const double> abs_b, RealMatrix& out);

/// max_ij (phi_ij - C mu^|i-j|)
double decay_violation(const RealMatrix& phi, double C, double mu);

RealMatrix matmul(const RealMatrix& x, const RealMatrix& y);
ComplexMatrix matmul(const ComplexMatrix& x, const ComplexMatrix& y);

/// out_j = 1 + sum_n kb_n / (a_n - z_j)
void h_samples(std::span<const double> a, std::span<const cplx> kb, std::span<const cplx> z, std::span<cplx> out);

}  // namespace serial

namespace omp {

void placement_products(const PlacementProductArgs& args, std::span<LogProduct> out);
void phi_matrix(std::span<const double> a, std::span<const double> abs_b, RealMatrix& out);
double decay_violation(const RealMatrix& phi, double C, double mu);
RealMatrix matmul(const RealMatrix& x, const RealMatrix& y);
ComplexMatrix matmul(const ComplexMatrix& x, const ComplexMatrix& y);
void h_samples(std::span<const double> a, std::span<const cplx> kb, std::span<const cplx> z, std::span<cplx> out);

}  // namespace omp

}  // namespace ensplace::kernels
