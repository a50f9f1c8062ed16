#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensplace/ensemble.hpp"
#include "ensplace/gain.hpp"
#include "ensplace/matrix.hpp"

namespace ensplace {

/// T = Diag(a) + b k^T as an explicit matrix.
struct ClosedLoopOperator {
    ComplexMatrix T;
    std::vector<double> a;
    std::vector<cplx> b;
    std::vector<cplx> k;
    double rank_one_defect = 0.0;  // max relative 2x2 minor of T - Diag(a)

    std::size_t size() const { return a.size(); }
};

ClosedLoopOperator closed_loop(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k);

/// h_k(z) = 1 + sum_n k_n b_n / (a_n - z). Throws NumericError within
/// 1e-12 a_n of a pole.
cplx h_eval(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k, cplx z);

struct Contour {
    cplx center{};
    double radius = 1.0;
    std::size_t samples = 256;
};

/// Zeros minus poles of h_k inside the circle.
struct WindingResult {
    Contour contour;  // samples = count actually used
    int winding = 0;
    double raw = 0.0;  // unrounded accumulated argument / 2 pi
    double min_abs_h = 0.0;
};

/// Uniform sampling with argument unwrapping; the sample count doubles from
/// contour.samples until two successive snapped values agree (cap 2^16).
/// Throws NumericError if the estimate is not within 0.1 of an integer or a
/// pole lies on the contour.
WindingResult winding(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k,
                      const Contour& contour);

/// ||T v - lambda v||_inf / ||v||_inf for v = (b_n / (a_n - lambda)), or
/// v = e_n when lambda coincides with a_n (open-loop branch). Throws
/// NumericError if |k . v| < 1e-12 (lambda cannot be a closed-loop eigenvalue
/// with this eigenvector form).
double eigvec_residual(const ClosedLoopOperator& op, cplx lambda);
double eigvec_residual(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k, cplx lambda);

/// The eigenvector used above, normalised so k . v = -1 (closed-loop branch).
std::vector<cplx> closed_loop_eigenvector(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k,
                                          cplx lambda);

/// P_ij = a_j pi_j / (a_i + a_j).
struct CauchyOperator {
    RealMatrix P;
    std::vector<double> pi;
    double involution_residual = 0.0;  // max |P P - I|

    std::size_t size() const { return P.rows(); }
};

/// pi should come from pi_sequence with M = N; the involution only holds
/// exactly for that self-consistent finite system.
CauchyOperator build_cauchy(const MaterializedEnsemble& ens, const PiSequence& pi);

/// T~ = Diag(a) + 1 k~^T with k~_n = k_n b_n; equals B^{-1} T_k B.
struct TransformedGenerator {
    ComplexMatrix T_tilde;
    std::vector<cplx> k_tilde;
    double similarity_residual = 0.0;  // max |T~ - B^{-1} T_k B| / max |T~|
};

TransformedGenerator transformed_generator(std::span<const double> a, std::span<const cplx> b,
                                           std::span<const cplx> k);

/// max |P T~ P + Diag(a)|.
double diagonalization_residual(const CauchyOperator& P, const MaterializedEnsemble& ens, const GainVector& gain);

struct ModeCheck {
    std::size_t n = 0;  // 1-based
    cplx eigenvalue{};
    bool placed = false;  // true: lambda_n, false: untouched a_n
    double residual = 0.0;
    std::optional<WindingResult> winding;
    bool ok = false;
};

struct TruncatedSpectrumReport {
    std::size_t N = 0;
    std::size_t N_gain = 0;
    std::vector<ModeCheck> modes;
    std::vector<std::string> failures;
    bool passed = false;
};

/// Places lambda_1..lambda_{N_gain} with the finite Ackermann gain,
/// zero-pads it to N modes and checks every closed-loop mode.
TruncatedSpectrumReport verify_truncated_spectrum(const MaterializedEnsemble& ens, const TargetSpectrum& targets,
                                                  std::size_t N, std::size_t N_gain, double tolerance = 1e-8);

}  // namespace ensplace
