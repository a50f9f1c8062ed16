#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ensplace/ensemble.hpp"
#include "ensplace/matrix.hpp"

namespace ensplace {

enum class GainMode { finite_ackermann, truncated_infinite, mirror_via_pi };

std::string to_string(GainMode mode);

/// Where the running log-magnitude of an entry's partial product first
/// exceeded the overflow guard.
struct Divergence {
    std::size_t n = 0;           // 1-based entry
    std::size_t m_at_trip = 0;   // 1-based product index
    double log_magnitude = 0.0;  // running log|k_n| when the guard tripped
};

/// Feedback gain k_1..k_N. Diverged entries hold NaN and are listed in
/// `diverged`. per_entry_tail is a first-order estimate of the relative
/// error from cutting the infinite product at M; it is not a certified bound.
struct GainVector {
    GainMode mode = GainMode::finite_ackermann;
    std::size_t N = 0;
    std::size_t M = 0;
    std::vector<cplx> entries;
    std::vector<double> per_entry_tail;
    std::vector<double> log_abs;
    std::vector<Divergence> diverged;

    std::size_t size() const { return entries.size(); }
    bool finite() const { return diverged.empty(); }
};

struct PiSequence {
    std::vector<double> values;
    std::vector<double> log_abs;
    std::vector<double> per_entry_tail;
    std::vector<Divergence> diverged;
    std::size_t M = 0;

    std::size_t size() const { return values.size(); }
};

struct PhiMatrix {
    RealMatrix phi;

    std::size_t size() const { return phi.rows(); }
};

/// Closed-form finite Ackermann gain for Diag(a) + b k^T with spectrum lambda,
/// evaluated by direct products. Throws NumericError on repeated a.
GainVector ackermann_finite(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> lambda);

struct OracleGain {
    GainVector gain;
    double vandermonde_residual = 0.0;  // max |V V^{-1} - I|
};

/// k' = -e_N C(A',b')^{-1} q(A') with C = Diag(b) V and the structured
/// inverse V^{-1} = L V^T D^{-1} (L the Hankel matrix of characteristic
/// polynomial coefficients, D_nn = prod_{m!=n}(a_n - a_m)). Cross-check only;
/// refuses N > 8.
OracleGain ackermann_oracle(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> lambda);

/// k_n(lambda) for n <= N with products over m <= M, accumulated in log form.
/// Requires N <= M <= ens.size() and targets.size() >= M.
GainVector gain_infinite(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t N,
                         std::size_t M);

/// pi_n = 2 prod_{m<=M, m!=n} (1 + a_m/a_n)/(1 - a_m/a_n), n <= N.
PiSequence pi_sequence(const MaterializedEnsemble& ens, std::size_t N, std::size_t M);

/// Mirror gain k_n(-a) = -a_n pi_n / b_n.
GainVector gain_mirror(const MaterializedEnsemble& ens, std::size_t N, std::size_t M);

/// phi_ij = |b_i/b_j| / (1 + a_i/a_j) over the first N modes.
PhiMatrix phi_matrix(const MaterializedEnsemble& ens, std::size_t N);

struct ConvergencePoint {
    std::size_t N = 0;
    double deviation_l1 = 0.0;   // ||k(lambda;N) - k(lambda;M)||_1
    double max_abs_r = 0.0;      // max_n |r_n(N)|
    std::vector<cplx> r;         // r_n(N) = prod_{N<m<=M} (1 - a_m/a_n)/(1 - lambda_m/a_n)
};

/// Distance of the finite-N gains from the M-truncated proxy for k(lambda).
std::vector<ConvergencePoint> convergence_diagnostic(const MaterializedEnsemble& ens, const TargetSpectrum& targets,
                                                     std::span<const std::size_t> N_list, std::size_t M);

}  // namespace ensplace
