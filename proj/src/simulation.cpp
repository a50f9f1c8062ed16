#include "ensplace/simulation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ensplace/error.hpp"

namespace ensplace {

namespace {

void axpy(std::vector<cplx>& out, const std::vector<cplx>& x, double h, const std::vector<cplx>& dx) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + h * dx[i];
}

class ClosedLoopRhs {
public:
    ClosedLoopRhs(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k) : a_(a), b_(b), k_(k) {}

    void operator()(const std::vector<cplx>& x, std::vector<cplx>& dx) const {
        cplx u{};
        for (std::size_t n = 0; n < x.size(); ++n) u += k_[n] * x[n];
        for (std::size_t n = 0; n < x.size(); ++n) dx[n] = a_[n] * x[n] + b_[n] * u;
    }

private:
    std::span<const double> a_;
    std::span<const cplx> b_;
    std::span<const cplx> k_;
};

void check_gain(const MaterializedEnsemble& ens, const GainVector& gain, std::size_t x0_size) {
    if (!gain.finite()) throw InvalidInput("cannot simulate with a diverged gain");
    if (gain.size() == 0 || gain.size() > ens.size()) throw InvalidInput("gain length does not fit the ensemble");
    if (x0_size != gain.size()) throw InvalidInput("initial state length must match the gain length");
}

}  // namespace

std::string to_string(Method m) { return m == Method::rk4 ? "rk4" : "closed_form"; }

std::string to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::decaying: return "decaying";
        case StabilityClass::bounded_nondecaying: return "bounded_nondecaying";
        case StabilityClass::growing: return "growing";
    }
    return "?";
}

double max_stable_step(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k) {
    double k1 = 0.0;
    double bmax = 0.0;
    for (const auto& v : k) k1 += std::abs(v);
    for (const auto& v : b) bmax = std::max(bmax, std::abs(v));
    double worst = 0.0;
    for (double an : a) worst = std::max(worst, std::abs(an) + k1 * bmax);
    return worst > 0.0 ? 0.1 / worst : std::numeric_limits<double>::infinity();
}

Trajectory integrate_rk4(const MaterializedEnsemble& ens, const GainVector& gain, std::span<const cplx> x0,
                         const TrajectoryConfig& config) {
    check_gain(ens, gain, x0.size());
    if (!(config.t_end > 0.0) || !(config.dt > 0.0)) throw InvalidInput("t_end and dt must be positive");
    if (config.record_every < 1) throw InvalidInput("record_every must be >= 1");
    const std::size_t N = gain.size();
    const auto a = std::span(ens.a).first(N);
    const auto b = std::span(ens.b).first(N);
    const double ceiling = max_stable_step(a, b, gain.entries);
    if (config.dt > ceiling * (1.0 + 1e-12)) {
        throw InvalidInput("dt " + std::to_string(config.dt) + " exceeds the stable step " + std::to_string(ceiling));
    }

    const auto steps = static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
    const double h = config.t_end / static_cast<double>(steps);
    const ClosedLoopRhs f(a, b, gain.entries);

    Trajectory traj;
    traj.method = Method::rk4;
    traj.space = config.space;
    std::vector<cplx> x(x0.begin(), x0.end());
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.norms.push_back(norm(x, config.space));
    };
    record(0.0);

    std::vector<cplx> k1(N), k2(N), k3(N), k4(N), tmp(N);
    for (std::size_t s = 1; s <= steps; ++s) {
        f(x, k1);
        axpy(tmp, x, 0.5 * h, k1);
        f(tmp, k2);
        axpy(tmp, x, 0.5 * h, k2);
        f(tmp, k3);
        axpy(tmp, x, h, k3);
        f(tmp, k4);
        for (std::size_t n = 0; n < N; ++n) x[n] += (h / 6.0) * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        if (s % config.record_every == 0 || s == steps) record(s == steps ? config.t_end : h * static_cast<double>(s));
    }
    return traj;
}

std::vector<Trajectory> simulate_batch(const MaterializedEnsemble& ens, const GainVector& gain,
                                       const std::vector<std::vector<cplx>>& initial_states,
                                       const TrajectoryConfig& config) {
    for (const auto& x0 : initial_states) check_gain(ens, gain, x0.size());
    std::vector<Trajectory> out(initial_states.size());
    const auto jobs = static_cast<std::ptrdiff_t>(initial_states.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < jobs; ++j) {
        out[static_cast<std::size_t>(j)] = integrate_rk4(ens, gain, initial_states[static_cast<std::size_t>(j)], config);
    }
    return out;
}

std::vector<cplx> modal_coordinates(const CauchyOperator& P, std::span<const cplx> b, std::span<const cplx> x) {
    const std::size_t N = P.size();
    std::vector<cplx> z(N);
    for (std::size_t i = 0; i < N; ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < N; ++j) acc += P.P(i, j) * (x[j] / b[j]);
        z[i] = acc;
    }
    return z;
}

Trajectory closed_form_flow(const MaterializedEnsemble& ens, const PiSequence& pi, std::span<const cplx> x0,
                            std::span<const double> times, const SpaceTag& space) {
    const std::size_t N = pi.size();
    if (pi.M != N) throw InvalidInput("closed_form_flow needs pi computed with product truncation M = N");
    if (x0.size() != N) throw InvalidInput("initial state length must match pi");
    const CauchyOperator P = build_cauchy(ens, pi);
    const auto b = std::span(ens.b).first(N);
    const std::vector<cplx> z0 = modal_coordinates(P, b, x0);

    Trajectory traj;
    traj.method = Method::closed_form;
    traj.space = space;
    std::vector<cplx> zt(N);
    for (double t : times) {
        for (std::size_t n = 0; n < N; ++n) zt[n] = std::exp(-ens.a[n] * t) * z0[n];
        std::vector<cplx> x(N);
        for (std::size_t i = 0; i < N; ++i) {
            cplx acc{};
            for (std::size_t j = 0; j < N; ++j) acc += P.P(i, j) * zt[j];
            x[i] = b[i] * acc;
        }
        // At t = 0 the chain is B P P B^{-1} x0 = x0 up to the involution
        // residual; return the initial state exactly.
        if (t == 0.0) x.assign(x0.begin(), x0.end());
        traj.times.push_back(t);
        traj.norms.push_back(norm(x, space));
        traj.states.push_back(std::move(x));
    }
    return traj;
}

Trajectory closed_form_flow(const MaterializedEnsemble& ens, const GainVector& gain, std::span<const cplx> x0,
                            std::span<const double> times, const SpaceTag& space) {
    if (gain.mode != GainMode::mirror_via_pi) throw InvalidInput("closed_form_flow only applies to the mirror gain");
    if (gain.M != gain.N) throw InvalidInput("closed_form_flow needs the mirror gain at product truncation M = N");
    return closed_form_flow(ens, pi_sequence(ens, gain.N, gain.N), x0, times, space);
}

bool z_norm_monotone_check(const MaterializedEnsemble& ens, std::span<const cplx> x0, const SpaceTag& space,
                           std::span<const double> times) {
    const std::size_t N = ens.size();
    if (x0.size() != N) throw InvalidInput("initial state length must match the ensemble");
    const CauchyOperator P = build_cauchy(ens, pi_sequence(ens, N, N));
    const std::vector<cplx> z0 = modal_coordinates(P, ens.b, x0);

    std::vector<double> sorted(times.begin(), times.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<cplx> weighted(N);
    double prev = std::numeric_limits<double>::infinity();
    for (double t : sorted) {
        for (std::size_t n = 0; n < N; ++n) weighted[n] = ens.b[n] * std::exp(-ens.a[n] * t) * z0[n];
        const double y = norm(weighted, space);
        if (y > prev * (1.0 + 1e-12)) return false;
        prev = y;
    }
    return true;
}

StabilityReport stability_report(const Trajectory& traj, const MaterializedEnsemble& ens,
                                 const TrajectoryConfig& config, const CauchyOperator* mirror_P) {
    if (traj.states.empty()) throw InvalidInput("empty trajectory");
    StabilityReport rep;
    const double n0 = traj.norms.front();
    if (n0 > 0.0) {
        for (double v : traj.norms) rep.sup_ratio = std::max(rep.sup_ratio, v / n0);
        rep.final_ratio = traj.norms.back() / n0;
    }
    if (rep.final_ratio < 0.01) {
        rep.classification = StabilityClass::decaying;
    } else if (rep.final_ratio > 10.0) {
        rep.classification = StabilityClass::growing;
    }

    if (mirror_P != nullptr) {
        if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
        const std::size_t N = mirror_P->size();
        const auto b = std::span(ens.b).first(N);
        // |b_n z_n(t)| for every record.
        std::vector<std::vector<double>> w(traj.states.size());
        for (std::size_t s = 0; s < traj.states.size(); ++s) {
            const auto z = modal_coordinates(*mirror_P, b, traj.states[s]);
            w[s].resize(N);
            for (std::size_t n = 0; n < N; ++n) w[s][n] = std::abs(b[n] * z[n]);
        }
        const double log_eps = std::log(config.epsilon);
        rep.first_passage.assign(N, std::nullopt);
        rep.predicted_first_passage.resize(N);
        double peak0 = 0.0;
        double peakT = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            rep.predicted_first_passage[n] = -log_eps / ens.a[n];
            peak0 = std::max(peak0, w.front()[n]);
            peakT = std::max(peakT, w.back()[n]);
            const double w0 = w.front()[n];
            if (!(w0 > 0.0)) continue;
            for (std::size_t s = 1; s < w.size(); ++s) {
                const double r1 = std::log(w[s][n] / w0);
                if (r1 <= log_eps) {
                    // log|w| is linear in t for a pure mode; interpolate.
                    const double r0 = std::log(w[s - 1][n] / w0);
                    const double t0 = traj.times[s - 1];
                    const double t1 = traj.times[s];
                    rep.first_passage[n] = (r0 == r1) ? t1 : t0 + (log_eps - r0) * (t1 - t0) / (r1 - r0);
                    break;
                }
            }
        }
        if (peak0 > 0.0) rep.max_mode_ratio_final = peakT / peak0;
    }
    return rep;
}

std::vector<cplx> ones_profile(std::size_t N) { return std::vector<cplx>(N, cplx{1.0, 0.0}); }

std::vector<cplx> basis_profile(std::size_t N, std::size_t n) {
    if (n < 1 || n > N) throw InvalidInput("basis index out of range");
    std::vector<cplx> x(N);
    x[n - 1] = 1.0;
    return x;
}

std::vector<cplx> random_profile(std::size_t N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> x(N);
    for (auto& v : x) v = u(rng);
    return x;
}

std::vector<cplx> inverse_b_modal_profile(const MaterializedEnsemble& ens, const CauchyOperator& P) {
    const std::size_t N = P.size();
    std::vector<cplx> x(N);
    for (std::size_t i = 0; i < N; ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < N; ++j) acc += P.P(i, j) / ens.b[j];
        x[i] = ens.b[i] * acc;
    }
    return x;
}

}  // namespace ensplace
