#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensplace/ensemble.hpp"
#include "ensplace/gain.hpp"

namespace ensplace {

// All verdicts here describe the materialised window [1, N] only. None of
// them is a statement about the infinite ensemble.

enum class Direction { increasing, decreasing, neither };
enum class DecayVerdict { infeasible_item1, feasible_item2_candidate, inconclusive };

std::string to_string(Direction d);
std::string to_string(DecayVerdict v);

struct DecayClassReport {
    double d_tested = 0.0;
    Direction direction = Direction::neither;
    std::optional<std::size_t> first_violation_index;  // 1-based, within the tested window
    double zeta_at_d = 0.0;
    DecayVerdict verdict = DecayVerdict::inconclusive;
    bool logratio_ok = false;
    double max_logratio_slope = 0.0;  // max_{n >= N/2} |ln(a_n/|b_n|)| / n
    std::size_t burn_in = 0;
    std::size_t window = 0;
};

/// Eventual monotonicity of n^d a_n after a burn-in of ceil(N/4), plus the
/// o(n) proxy max_{second half} |ln(a_n/|b_n|)|/n <= 0.05.
DecayClassReport decay_class(const MaterializedEnsemble& ens, double d);

/// decay_class over a user grid. No optimisation over d is attempted.
std::vector<DecayClassReport> decay_scan(const MaterializedEnsemble& ens, std::span<const double> d_grid);

struct RatioCertificate {
    double sup_a_ratio = 0.0;
    double inf_b_ratio = 0.0;
    double sup_b_ratio = 0.0;
    std::optional<double> nu0;
    std::optional<double> nu1;
    std::optional<double> nu2;
    bool pass = false;
};

/// Looks for 0 < nu0 < nu1 < nu2 < 1 with a_{n+1}/a_n < nu0 and
/// nu1 < |b_{n+1}/b_n| < nu2 on the window. Constants sit a third of the
/// smallest slack inside each gap.
RatioCertificate ratio_test(const MaterializedEnsemble& ens);

struct DecayCertificate {
    double C = 1.0;
    double mu = 0.0;
    double kappa = 0.0;          // C (1 + mu) / (1 - mu)
    double max_violation = 0.0;  // max_ij phi_ij - C mu^|i-j|
    double max_row_sum = 0.0;
    double max_col_sum = 0.0;
    bool pass = false;
};

/// Checks phi_ij <= C mu^|i-j| entrywise.
DecayCertificate phi_decay_certificate(const PhiMatrix& phi, double C, double mu);

/// Same with C = 1 and mu = max(nu0/nu1, nu2) from a passing ratio
/// certificate. Throws InvalidInput when the certificate did not pass.
DecayCertificate phi_decay_certificate(const PhiMatrix& phi, const RatioCertificate& ratio);

struct PiBoundCheck {
    double bound = 0.0;       // ln 2 + 4 nu0 / (1 - nu0)^2
    double max_log_pi = 0.0;
    bool pass = false;
};

PiBoundCheck pi_bound_check(const PiSequence& pi, double nu0);

/// Finite-window proxy for lambda_n / a_n = o(1): rho_n = |lambda_n|/a_n is
/// nonincreasing on the second half of [1, N] and rho_N <= 0.05.
bool targets_within_hypotheses(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t N);

struct FeasibilityReport {
    std::size_t N = 0;
    std::size_t M = 0;
    std::vector<DecayClassReport> decay;
    RatioCertificate ratio;
    std::optional<DecayCertificate> phi_decay;
    std::optional<PiBoundCheck> pi_bound;
    bool targets_in_hypotheses = false;
    std::vector<std::string> conclusions;
};

/// Runs every check and phrases the implied conclusions for the window.
FeasibilityReport assess(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t N,
                         std::size_t M, std::span<const double> d_grid);

}  // namespace ensplace
