#include "ensplace/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ensplace/error.hpp"
#include "ensplace/kernels.hpp"
#include "ensplace/special.hpp"

namespace ensplace {

namespace {

constexpr double kLogRatioSlope = 0.05;
constexpr double kCriticalGap = 1e-6;  // |d - 2| <= gap is reported inconclusive
constexpr double kRhoEnd = 0.05;

std::string window_text(std::size_t N) {
    std::ostringstream os;
    os << "hypotheses verified on window [1, " << N << "]";
    return os.str();
}

}  // namespace

std::string to_string(Direction d) {
    switch (d) {
        case Direction::increasing: return "increasing";
        case Direction::decreasing: return "decreasing";
        case Direction::neither: return "neither";
    }
    return "?";
}

std::string to_string(DecayVerdict v) {
    switch (v) {
        case DecayVerdict::infeasible_item1: return "infeasible_item1";
        case DecayVerdict::feasible_item2_candidate: return "feasible_item2_candidate";
        case DecayVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

DecayClassReport decay_class(const MaterializedEnsemble& ens, double d) {
    if (!(d > 1.0)) throw InvalidInput("decay_class needs d > 1");
    const std::size_t N = ens.size();
    DecayClassReport r;
    r.d_tested = d;
    r.window = N;
    r.burn_in = (N + 3) / 4;
    r.zeta_at_d = zeta(d, 1e-10).value;

    // log(n^d a_n) for n in (burn_in, N]; need at least two points.
    const std::size_t first = r.burn_in + 1;
    if (N >= first + 1) {
        auto s = [&](std::size_t n) { return d * std::log(static_cast<double>(n)) + std::log(ens.a[n - 1]); };
        int sign0 = 0;
        bool monotone = true;
        for (std::size_t n = first; n < N; ++n) {
            const double diff = s(n + 1) - s(n);
            const int sg = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
            if (n == first) sign0 = sg;
            if (sg == 0 || sg != sign0) {
                monotone = false;
                r.first_violation_index = n + 1;
                break;
            }
        }
        if (monotone && sign0 > 0) r.direction = Direction::increasing;
        if (monotone && sign0 < 0) r.direction = Direction::decreasing;
    }

    const std::size_t half = std::max<std::size_t>((N + 1) / 2, 1);
    for (std::size_t n = half; n <= N; ++n) {
        const double slope = std::abs(std::log(ens.a[n - 1] / std::abs(ens.b[n - 1]))) / static_cast<double>(n);
        r.max_logratio_slope = std::max(r.max_logratio_slope, slope);
    }
    r.logratio_ok = r.max_logratio_slope <= kLogRatioSlope;

    if (d < 2.0 - kCriticalGap && r.direction == Direction::increasing) {
        r.verdict = DecayVerdict::infeasible_item1;
    } else if (d > 2.0 + kCriticalGap && r.direction == Direction::decreasing && r.logratio_ok) {
        r.verdict = DecayVerdict::feasible_item2_candidate;
    }
    return r;
}

std::vector<DecayClassReport> decay_scan(const MaterializedEnsemble& ens, std::span<const double> d_grid) {
    std::vector<DecayClassReport> out;
    out.reserve(d_grid.size());
    for (double d : d_grid) out.push_back(decay_class(ens, d));
    return out;
}

RatioCertificate ratio_test(const MaterializedEnsemble& ens) {
    const std::size_t N = ens.size();
    if (N < 2) throw InvalidInput("ratio_test needs N >= 2");
    RatioCertificate c;
    c.sup_a_ratio = -INFINITY;
    c.inf_b_ratio = INFINITY;
    c.sup_b_ratio = -INFINITY;
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const double ar = ens.a[n + 1] / ens.a[n];
        const double br = std::abs(ens.b[n + 1] / ens.b[n]);
        c.sup_a_ratio = std::max(c.sup_a_ratio, ar);
        c.inf_b_ratio = std::min(c.inf_b_ratio, br);
        c.sup_b_ratio = std::max(c.sup_b_ratio, br);
    }
    const double slack_ab = c.inf_b_ratio - c.sup_a_ratio;
    const double slack_one = 1.0 - c.sup_b_ratio;
    if (c.sup_a_ratio > 0.0 && slack_ab > 0.0 && slack_one > 0.0) {
        const double g = std::min(slack_ab, slack_one) / 3.0;
        c.nu0 = c.sup_a_ratio + g;
        c.nu1 = c.inf_b_ratio - g;
        c.nu2 = std::min(1.0, c.sup_b_ratio + g);
        c.pass = *c.nu0 < *c.nu1 && *c.nu1 < *c.nu2 && *c.nu2 < 1.0;
    }
    return c;
}

DecayCertificate phi_decay_certificate(const PhiMatrix& phi, double C, double mu) {
    if (!(C > 0.0)) throw InvalidInput("decay certificate needs C > 0");
    if (!(mu > 0.0 && mu < 1.0)) throw InvalidInput("decay certificate needs mu in (0,1)");
    DecayCertificate cert;
    cert.C = C;
    cert.mu = mu;
    cert.kappa = C * (1.0 + mu) / (1.0 - mu);
    cert.max_violation = kernels::omp::decay_violation(phi.phi, C, mu);
    const std::size_t N = phi.size();
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        double col = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            row += phi.phi(i, j);
            col += phi.phi(j, i);
        }
        cert.max_row_sum = std::max(cert.max_row_sum, row);
        cert.max_col_sum = std::max(cert.max_col_sum, col);
    }
    cert.pass = cert.max_violation <= 0.0;
    return cert;
}

DecayCertificate phi_decay_certificate(const PhiMatrix& phi, const RatioCertificate& ratio) {
    if (!ratio.pass || !ratio.nu0 || !ratio.nu1 || !ratio.nu2)
        throw InvalidInput("no passing ratio certificate to derive (C, mu) from");
    const double mu = std::max(*ratio.nu0 / *ratio.nu1, *ratio.nu2);
    return phi_decay_certificate(phi, 1.0, mu);
}

PiBoundCheck pi_bound_check(const PiSequence& pi, double nu0) {
    if (!(nu0 > 0.0 && nu0 < 1.0)) throw InvalidInput("pi_bound_check needs nu0 in (0,1)");
    PiBoundCheck out;
    out.bound = std::log(2.0) + 4.0 * nu0 / ((1.0 - nu0) * (1.0 - nu0));
    out.max_log_pi = -INFINITY;
    for (double v : pi.log_abs) out.max_log_pi = std::max(out.max_log_pi, v);
    out.pass = pi.diverged.empty() && out.max_log_pi <= out.bound;
    return out;
}

bool targets_within_hypotheses(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t N) {
    if (N < 1 || N > ens.size() || N > targets.size()) throw InvalidInput("targets_within_hypotheses: N out of range");
    auto rho = [&](std::size_t n) { return std::abs(targets.values[n - 1]) / ens.a[n - 1]; };
    for (std::size_t n = std::max<std::size_t>((N + 1) / 2, 1); n < N; ++n)
        if (rho(n + 1) > rho(n)) return false;
    return rho(N) <= kRhoEnd;
}

FeasibilityReport assess(const MaterializedEnsemble& ens, const TargetSpectrum& targets, std::size_t N,
                         std::size_t M, std::span<const double> d_grid) {
    FeasibilityReport rep;
    rep.N = N;
    rep.M = M;
    const MaterializedEnsemble window = ens.prefix(N);
    rep.decay = decay_scan(window, d_grid);
    rep.targets_in_hypotheses = targets_within_hypotheses(ens, targets, N);

    if (N >= 2) {
        rep.ratio = ratio_test(window);
    }
    if (rep.ratio.pass) {
        rep.phi_decay = phi_decay_certificate(phi_matrix(ens, N), rep.ratio);
        rep.pi_bound = pi_bound_check(pi_sequence(ens, N, M), *rep.ratio.nu0);
    }

    const std::string where = window_text(N);
    for (const auto& d : rep.decay) {
        std::ostringstream os;
        os << "decay class d=" << d.d_tested << ": n^d a_n " << to_string(d.direction) << ", verdict "
           << to_string(d.verdict);
        if (d.verdict == DecayVerdict::infeasible_item1)
            os << "; no target in the closed left half-plane gives a bounded gain (" << where << ")";
        if (d.verdict == DecayVerdict::feasible_item2_candidate) {
            os << "; k(lambda) in l1 for targets with lambda_n/a_n -> 0 (" << where << ")";
            if (!rep.targets_in_hypotheses) os << "; chosen targets do not satisfy |lambda_n|/a_n -> 0";
        }
        rep.conclusions.push_back(os.str());
    }
    if (rep.ratio.pass) {
        std::ostringstream os;
        os << "ratio conditions hold with nu0=" << *rep.ratio.nu0 << ", nu1=" << *rep.ratio.nu1
           << ", nu2=" << *rep.ratio.nu2 << " (" << where << ")";
        rep.conclusions.push_back(os.str());
        if (rep.phi_decay && rep.phi_decay->pass && rep.pi_bound && rep.pi_bound->pass) {
            rep.conclusions.push_back("pi bounded and Phi spatially exponentially decaying; mirror gain k(-a) in l1; "
                                      "mirror loop asymptotically stable on l^p (p finite) and c0, stable but not "
                                      "asymptotically stable on l_inf and c (" + where + ")");
        }
    } else {
        rep.conclusions.push_back("ratio conditions not met on the window; mirror-gain sufficiency not certified");
    }
    return rep;
}

}  // namespace ensplace
