#pragma once

#include <cstddef>

#include "ensplace/ensemble.hpp"

namespace ensplace {

struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;  // rigorous bound on |value - exact|
    std::size_t terms_used = 0;
};

/// zeta(d) = d - 2d sum_{m>=1} 1/(m^2 d^2 - 1), d > 1.
///
/// The remainder after M terms is bracketed with the trapezoid/midpoint
/// comparisons for a convex decreasing summand,
///   int_M^inf f - f(M)/2  <=  sum_{m>M} f(m)  <=  int_{M+1/2}^inf f,
/// and the bracket midpoint is used. M doubles until the half-width is
/// below tol.
SeriesValue zeta(double d, double tol);

/// xi(d) = d + 2d sum_{m>=1} (-1)^{m-1}/(m^2 d^2 - 1), bounded by the first
/// omitted term.
SeriesValue xi(double d, double tol);

enum class DiagnosticKind { alpha, beta };

struct DiagnosticSequence {
    DiagnosticKind kind = DiagnosticKind::alpha;
    std::size_t n = 1;
    double value = 0.0;
    std::size_t inner_truncation = 0;
};

/// alpha_n = (1/n) sum_{m<=M, m!=n} ln|1 - a_m/a_n|. n is 1-based.
DiagnosticSequence alpha(const MaterializedEnsemble& ens, std::size_t n, std::size_t M);

/// beta_n = (1/n) sum_{m<=M} ln|1 - lambda_m/a_n|. Nonnegative for targets
/// in the closed left half-plane.
DiagnosticSequence beta(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t n,
                        std::size_t M);

/// max(100 n, 10^4).
std::size_t default_inner_truncation(std::size_t n);

}  // namespace ensplace
