#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensplace/ensemble.hpp"
#include "ensplace/gain.hpp"
#include "ensplace/spectral.hpp"

namespace ensplace {

struct TrajectoryConfig {
    double t_end = 10.0;
    double dt = 0.01;
    std::size_t record_every = 1;
    SpaceTag space{};
    double epsilon = 0.1;  // first-passage level, in (0,1)
};

enum class Method { rk4, closed_form };

std::string to_string(Method m);

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<cplx>> states;
    std::vector<double> norms;
    Method method = Method::rk4;
    SpaceTag space{};
};

/// 0.1 / max_n (a_n + ||k||_1 max|b|): the step-size ceiling for RK4.
double max_stable_step(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k);

/// Fixed-step classic RK4 on x' = Diag(a) x + b (k . x). The step is
/// t_end / ceil(t_end / dt) so the last record lands on t_end. Throws
/// InvalidInput if dt exceeds max_stable_step.
Trajectory integrate_rk4(const MaterializedEnsemble& ens, const GainVector& gain, std::span<const cplx> x0,
                         const TrajectoryConfig& config);

/// Runs independent RK4 jobs concurrently; results are in input order and
/// identical to calling integrate_rk4 on each.
std::vector<Trajectory> simulate_batch(const MaterializedEnsemble& ens, const GainVector& gain,
                                       const std::vector<std::vector<cplx>>& initial_states,
                                       const TrajectoryConfig& config);

/// Exact mirror-loop flow x(t) = B P exp(-A t) P B^{-1} x0 with P built
/// from pi (which must use product truncation M = N).
Trajectory closed_form_flow(const MaterializedEnsemble& ens, const PiSequence& pi, std::span<const cplx> x0,
                            std::span<const double> times, const SpaceTag& space);

/// Same, for a gain; refuses anything but a mirror gain with M = N.
Trajectory closed_form_flow(const MaterializedEnsemble& ens, const GainVector& gain, std::span<const cplx> x0,
                            std::span<const double> times, const SpaceTag& space);

/// z = P B^{-1} x, the decoupled coordinates of the mirror loop.
std::vector<cplx> modal_coordinates(const CauchyOperator& P, std::span<const cplx> b, std::span<const cplx> x);

/// True iff ||B z(t)||_X is nonincreasing over the (sorted) sample times,
/// with z(t) = exp(-A t) P B^{-1} x0 and P built at truncation ens.size().
/// Does not validate the ensemble, so it can serve as a negative control.
bool z_norm_monotone_check(const MaterializedEnsemble& ens, std::span<const cplx> x0, const SpaceTag& space,
                           std::span<const double> times);

enum class StabilityClass { decaying, bounded_nondecaying, growing };

std::string to_string(StabilityClass c);

struct StabilityReport {
    double sup_ratio = 0.0;    // max_t ||x(t)|| / ||x(0)||
    double final_ratio = 0.0;  // ||x(T)|| / ||x(0)||
    StabilityClass classification = StabilityClass::bounded_nondecaying;
    // Mirror regime only (a Cauchy operator was supplied):
    std::vector<std::optional<double>> first_passage;  // time |b_n z_n(t)| / |b_n z_n(0)| first <= epsilon
    std::vector<double> predicted_first_passage;       // -ln(epsilon) / a_n
    std::optional<double> max_mode_ratio_final;        // max_n |b_n z_n(T)| / max_n |b_n z_n(0)|
};

/// decaying if final_ratio < 0.01, growing if final_ratio > 10, otherwise
/// bounded_nondecaying.
StabilityReport stability_report(const Trajectory& traj, const MaterializedEnsemble& ens,
                                 const TrajectoryConfig& config, const CauchyOperator* mirror_P = nullptr);

// Initial-condition samples.
std::vector<cplx> ones_profile(std::size_t N);
std::vector<cplx> basis_profile(std::size_t N, std::size_t n);  // 1-based n
std::vector<cplx> random_profile(std::size_t N, std::uint64_t seed);
/// x0 with modal coordinates z(0) = (1/b_n), i.e. B z(0) = 1.
std::vector<cplx> inverse_b_modal_profile(const MaterializedEnsemble& ens, const CauchyOperator& P);

}  // namespace ensplace
