#include "ensplace/gain.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ensplace/error.hpp"
#include "ensplace/kernels.hpp"

namespace ensplace {

namespace {

constexpr double kOverflowGuard = 700.0;
constexpr std::size_t kOracleMaxN = 8;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> lambda) {
    if (a.empty()) throw InvalidInput("gain synthesis needs at least one mode");
    if (b.size() != a.size() || lambda.size() != a.size())
        throw InvalidInput("a, b and lambda must have the same length");
}

void check_truncation(const MaterializedEnsemble& ens, std::size_t N, std::size_t M) {
    if (N < 1) throw InvalidInput("N must be >= 1");
    if (M < N) throw InvalidInput("product truncation M must be >= N");
    if (M > ens.size()) throw InvalidInput("product truncation M exceeds the materialised ensemble");
}

// Relative-error estimate for dropping factors m > M of entry n, given
// sum_{m>M} (a_m + |lambda_m|).
double tail_estimate(const MaterializedEnsemble& ens, std::size_t n, std::size_t M, double tail_sum) {
    const double next_a = ens.tail_sum_a(M) - ens.tail_sum_a(M + 1);
    const double floor = ens.a[n] - next_a;
    if (!(floor > 0.0)) return std::numeric_limits<double>::infinity();
    return std::expm1(tail_sum / floor);
}

}  // namespace

std::string to_string(GainMode mode) {
    switch (mode) {
        case GainMode::finite_ackermann: return "finite_ackermann";
        case GainMode::truncated_infinite: return "truncated_infinite";
        case GainMode::mirror_via_pi: return "mirror_via_pi";
    }
    return "?";
}

GainVector ackermann_finite(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> lambda) {
    check_lengths(a, b, lambda);
    const std::size_t N = a.size();
    GainVector g;
    g.mode = GainMode::finite_ackermann;
    g.N = g.M = N;
    g.entries.resize(N);
    g.per_entry_tail.assign(N, 0.0);
    g.log_abs.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        if (b[n] == cplx{}) throw NumericError("b_" + std::to_string(n + 1) + " is zero");
        cplx prod = -(a[n] - lambda[n]) / b[n];
        for (std::size_t m = 0; m < N; ++m) {
            if (m == n) continue;
            if (a[m] == a[n]) throw NumericError("repeated open-loop pole a_" + std::to_string(m + 1));
            prod *= (1.0 - lambda[m] / a[n]) / (1.0 - a[m] / a[n]);
        }
        g.entries[n] = prod;
        g.log_abs[n] = std::log(std::abs(prod));
    }
    return g;
}

OracleGain ackermann_oracle(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> lambda) {
    check_lengths(a, b, lambda);
    const std::size_t N = a.size();
    if (N > kOracleMaxN) throw InvalidInput("ackermann_oracle is limited to N <= 8 (Vandermonde conditioning)");

    // Characteristic polynomial of Diag(a): coefficients c_0..c_N, c_N = 1.
    std::vector<double> c{1.0};
    for (double root : a) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= root * c[i];
        }
        c = std::move(next);
    }

    ComplexMatrix L(N, N), Vt(N, N), V(N, N), Dinv(N, N), Binv(N, N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            if (i + j + 1 <= N) L(i, j) = c[i + j + 1];
            V(i, j) = std::pow(a[i], static_cast<double>(j));
            Vt(j, i) = V(i, j);
        }
        double d = 1.0;
        for (std::size_t m = 0; m < N; ++m)
            if (m != i) d *= a[i] - a[m];
        if (d == 0.0) throw NumericError("repeated open-loop pole in Vandermonde oracle");
        Dinv(i, i) = 1.0 / d;
        if (b[i] == cplx{}) throw NumericError("b_" + std::to_string(i + 1) + " is zero");
        Binv(i, i) = 1.0 / b[i];
    }

    const ComplexMatrix Vinv = kernels::serial::matmul(kernels::serial::matmul(L, Vt), Dinv);
    const ComplexMatrix Cinv = kernels::serial::matmul(Vinv, Binv);

    OracleGain out;
    out.vandermonde_residual = max_abs_diff(kernels::serial::matmul(V, Vinv), ComplexMatrix::identity(N));
    GainVector& g = out.gain;
    g.mode = GainMode::finite_ackermann;
    g.N = g.M = N;
    g.entries.resize(N);
    g.per_entry_tail.assign(N, 0.0);
    g.log_abs.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        cplx q{1.0, 0.0};
        for (std::size_t m = 0; m < N; ++m) q *= a[j] - lambda[m];
        g.entries[j] = -Cinv(N - 1, j) * q;
        g.log_abs[j] = std::log(std::abs(g.entries[j]));
    }
    return out;
}

GainVector gain_infinite(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t N,
                         std::size_t M) {
    check_truncation(ens, N, M);
    if (targets.size() < M) throw InvalidInput("targets shorter than the product truncation M");

    std::vector<double> offset(N);
    std::vector<double> phase(N);
    for (std::size_t n = 0; n < N; ++n) {
        if (ens.b[n] == cplx{}) throw NumericError("b_" + std::to_string(n + 1) + " is zero");
        const cplx pre = -(ens.a[n] - targets.values[n]) / ens.b[n];
        offset[n] = std::log(std::abs(pre));
        phase[n] = std::arg(pre);
    }

    std::vector<kernels::LogProduct> prods(N);
    kernels::omp::placement_products({ens.a, targets.values, offset, M, kOverflowGuard}, prods);

    const double tail_sum = ens.tail_sum_a(M) + targets.tail_abs_sum(ens, M);
    GainVector g;
    g.mode = GainMode::truncated_infinite;
    g.N = N;
    g.M = M;
    g.entries.resize(N);
    g.log_abs.resize(N);
    g.per_entry_tail.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        const auto& p = prods[n];
        g.log_abs[n] = p.log_abs;
        g.per_entry_tail[n] = tail_estimate(ens, n, M, tail_sum);
        if (p.tripped) {
            g.diverged.push_back({n + 1, p.trip_index, p.trip_log_abs});
            g.entries[n] = {kNaN, kNaN};
        } else {
            g.entries[n] = std::polar(std::exp(p.log_abs), p.arg + phase[n]);
        }
    }
    return g;
}

PiSequence pi_sequence(const MaterializedEnsemble& ens, std::size_t N, std::size_t M) {
    check_truncation(ens, N, M);
    std::vector<cplx> mirror(M);
    for (std::size_t m = 0; m < M; ++m) mirror[m] = -ens.a[m];
    std::vector<double> offset(N, std::numbers::ln2);

    std::vector<kernels::LogProduct> prods(N);
    kernels::omp::placement_products({ens.a, mirror, offset, M, kOverflowGuard}, prods);

    const double tail_sum = 2.0 * ens.tail_sum_a(M);
    PiSequence pi;
    pi.M = M;
    pi.values.resize(N);
    pi.log_abs.resize(N);
    pi.per_entry_tail.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        const auto& p = prods[n];
        pi.log_abs[n] = p.log_abs;
        pi.per_entry_tail[n] = tail_estimate(ens, n, M, tail_sum);
        if (p.tripped) {
            pi.diverged.push_back({n + 1, p.trip_index, p.trip_log_abs});
            pi.values[n] = kNaN;
            continue;
        }
        // Every factor is real, so the phase is an integer multiple of pi.
        const auto turns = std::llround(p.arg / std::numbers::pi);
        const double sign = (turns % 2 == 0) ? 1.0 : -1.0;
        pi.values[n] = sign * std::exp(p.log_abs);
    }
    return pi;
}

GainVector gain_mirror(const MaterializedEnsemble& ens, std::size_t N, std::size_t M) {
    const PiSequence pi = pi_sequence(ens, N, M);
    GainVector g;
    g.mode = GainMode::mirror_via_pi;
    g.N = N;
    g.M = M;
    g.entries.resize(N);
    g.log_abs.resize(N);
    g.per_entry_tail = pi.per_entry_tail;
    g.diverged = pi.diverged;
    for (std::size_t n = 0; n < N; ++n) {
        if (ens.b[n] == cplx{}) throw NumericError("b_" + std::to_string(n + 1) + " is zero");
        g.entries[n] = -ens.a[n] * pi.values[n] / ens.b[n];
        g.log_abs[n] = std::log(ens.a[n]) + pi.log_abs[n] - std::log(std::abs(ens.b[n]));
    }
    return g;
}

PhiMatrix phi_matrix(const MaterializedEnsemble& ens, std::size_t N) {
    if (N < 1 || N > ens.size()) throw InvalidInput("phi_matrix: N out of range");
    std::vector<double> abs_b(N);
    for (std::size_t n = 0; n < N; ++n) abs_b[n] = std::abs(ens.b[n]);
    PhiMatrix out;
    kernels::omp::phi_matrix(std::span(ens.a).first(N), abs_b, out.phi);
    return out;
}

std::vector<ConvergencePoint> convergence_diagnostic(const MaterializedEnsemble& ens, const TargetSpectrum& targets,
                                                     std::span<const std::size_t> N_list, std::size_t M) {
    const GainVector reference = gain_infinite(ens, targets, M, M);
    std::vector<ConvergencePoint> out;
    out.reserve(N_list.size());
    for (std::size_t N : N_list) {
        if (N > M) throw InvalidInput("convergence_diagnostic: N must not exceed M");
        const GainVector finite = gain_infinite(ens, targets, N, N);
        ConvergencePoint pt;
        pt.N = N;
        for (std::size_t n = 0; n < N; ++n) pt.deviation_l1 += std::abs(finite.entries[n] - reference.entries[n]);
        for (std::size_t n = N; n < M; ++n) pt.deviation_l1 += std::abs(reference.entries[n]);

        pt.r.resize(N);
        for (std::size_t n = 0; n < N; ++n) {
            double log_abs = 0.0;
            double arg = 0.0;
            for (std::size_t m = N; m < M; ++m) {
                const double num = 1.0 - ens.a[m] / ens.a[n];
                const cplx den = 1.0 - targets.values[m] / ens.a[n];
                log_abs += std::log(std::abs(num)) - std::log(std::abs(den));
                arg -= std::arg(den);
            }
            pt.r[n] = std::polar(std::exp(log_abs), arg);
            pt.max_abs_r = std::max(pt.max_abs_r, std::abs(pt.r[n]));
        }
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace ensplace
