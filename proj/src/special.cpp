#include "ensplace/special.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ensplace/error.hpp"

namespace ensplace {

namespace {

constexpr double kMinExponent = 1.0 + 1e-6;
constexpr std::size_t kMaxTerms = std::size_t{1} << 26;

void check_args(double d, double tol) {
    if (!(d > kMinExponent)) throw InvalidInput("series needs d > 1 (got " + std::to_string(d) + ")");
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
}

// sum_{m=1}^{M} term(m), accumulated from the smallest term upward.
template <typename Term>
double backward_sum(std::size_t M, Term term) {
    double acc = 0.0;
    for (std::size_t m = M; m >= 1; --m) acc += term(static_cast<double>(m));
    return acc;
}

// int_x^inf dm / (m^2 d^2 - 1) = ln((xd + 1)/(xd - 1)) / (2d)
double tail_integral(double x, double d) { return std::log1p(2.0 / (x * d - 1.0)) / (2.0 * d); }

}  // namespace

SeriesValue zeta(double d, double tol) {
    check_args(d, tol);
    auto f = [d](double m) { return 1.0 / (m * m * d * d - 1.0); };
    for (std::size_t M = 64; M <= kMaxTerms; M *= 2) {
        const double Md = static_cast<double>(M);
        const double lower = tail_integral(Md, d) - 0.5 * f(Md);
        const double upper = tail_integral(Md + 0.5, d);
        const double half_width = 2.0 * d * 0.5 * (upper - lower);
        if (half_width > tol) continue;
        const double partial = backward_sum(M, f);
        const double tail = 0.5 * (upper + lower);
        // Rounding of the backward partial sum, a few ulp per doubling level.
        const double rounding = 2.0 * d * (partial + tail) * 1e-16 * std::log2(Md);
        if (half_width + rounding <= tol) return {d - 2.0 * d * (partial + tail), half_width + rounding, M};
    }
    throw NumericError("zeta series did not reach tolerance");
}

SeriesValue xi(double d, double tol) {
    check_args(d, tol);
    // First omitted term magnitude times 2d: 2d / ((M+1)^2 d^2 - 1) <= tol.
    const double need = std::sqrt((2.0 * d / tol + 1.0) / (d * d));
    const auto M = static_cast<std::size_t>(std::ceil(std::max(need, 1.0)));
    if (M > kMaxTerms) throw NumericError("xi series would need too many terms");
    auto term = [d](double m) {
        const double sign = (static_cast<std::size_t>(m) % 2 == 1) ? 1.0 : -1.0;
        return sign / (m * m * d * d - 1.0);
    };
    const double partial = backward_sum(M, term);
    const double next = static_cast<double>(M + 1);
    return {d + 2.0 * d * partial, 2.0 * d / (next * next * d * d - 1.0), M};
}

DiagnosticSequence alpha(const MaterializedEnsemble& ens, std::size_t n, std::size_t M) {
    if (n < 1) throw InvalidInput("alpha: n is 1-based");
    if (n > M) throw InvalidInput("alpha: n must not exceed the inner truncation M");
    if (M > ens.size()) throw InvalidInput("alpha: M exceeds the materialised ensemble");
    const double an = ens.a[n - 1];
    double acc = 0.0;
    for (std::size_t m = 1; m <= M; ++m) {
        if (m == n) continue;
        acc += std::log(std::abs(1.0 - ens.a[m - 1] / an));
    }
    return {DiagnosticKind::alpha, n, acc / static_cast<double>(n), M};
}

DiagnosticSequence beta(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t n,
                        std::size_t M) {
    if (n < 1) throw InvalidInput("beta: n is 1-based");
    if (n > M) throw InvalidInput("beta: n must not exceed the inner truncation M");
    if (M > ens.size() || M > targets.size()) throw InvalidInput("beta: M exceeds the materialised data");
    const double an = ens.a[n - 1];
    double acc = 0.0;
    for (std::size_t m = 1; m <= M; ++m) acc += std::log(std::abs(1.0 - targets.values[m - 1] / an));
    return {DiagnosticKind::beta, n, acc / static_cast<double>(n), M};
}

std::size_t default_inner_truncation(std::size_t n) { return std::max<std::size_t>(100 * n, 10000); }

}  // namespace ensplace
