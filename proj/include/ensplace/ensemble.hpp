#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ensplace/matrix.hpp"

namespace ensplace {

// ---------------------------------------------------------------------------
// Sequence spaces
// ---------------------------------------------------------------------------

struct SpaceTag {
    enum class Kind { lp, l_infinity, c, c_zero };

    Kind kind = Kind::lp;
    double p = 2.0;  // only meaningful for Kind::lp

    static SpaceTag lp(double p);
    static SpaceTag l_infinity() { return {Kind::l_infinity, 0.0}; }
    static SpaceTag convergent() { return {Kind::c, 0.0}; }
    static SpaceTag null_sequences() { return {Kind::c_zero, 0.0}; }

    /// True for c_0 and l^p with finite p: the spaces on which the mirror
    /// feedback is asymptotically stable.
    bool is_separable_decay_space() const { return kind == Kind::lp || kind == Kind::c_zero; }

    friend bool operator==(const SpaceTag&, const SpaceTag&) = default;
};

std::string to_string(const SpaceTag& space);
SpaceTag parse_space(const std::string& text);

/// Norm of a finite representative. l_infinity, c and c_zero all use the
/// max modulus.
double norm(std::span<const cplx> x, const SpaceTag& space);

// ---------------------------------------------------------------------------
// Ensemble description and materialisation
// ---------------------------------------------------------------------------

struct Geometric {
    double ratio = 0.5;
    double scale = 1.0;
};

struct Power {
    double exponent = 2.0;
    double scale = 1.0;
};

struct ExplicitPoles {
    std::vector<double> values;
};

struct ExplicitInputs {
    std::vector<cplx> values;
};

/// Family for the open-loop poles a_n.
using PoleFamily = std::variant<Geometric, Power, ExplicitPoles>;
/// Family for the input gains b_n. Geometric ratio may be any positive real
/// and the power exponent may be 0 (constant b).
using InputFamily = std::variant<Geometric, Power, ExplicitInputs>;

struct EnsembleSpec {
    PoleFamily a;
    InputFamily b;
    std::size_t N = 1;
    SpaceTag space{};
};

/// Finite truncation of (a_n, b_n). Index 0 holds n = 1.
struct MaterializedEnsemble {
    std::vector<double> a;
    std::vector<cplx> b;
    SpaceTag space{};
    PoleFamily family;  // kept for tail estimates beyond the stored window

    std::size_t size() const { return a.size(); }

    /// First n modes, same family and space.
    MaterializedEnsemble prefix(std::size_t n) const;

    /// Estimate of sum_{m > M} a_m. Stored entries are summed exactly; the
    /// part beyond size() uses the family's closed form (geometric), a
    /// midpoint-integral estimate (power) or a geometric extrapolation of the
    /// last two entries (explicit).
    double tail_sum_a(std::size_t M) const;
};

MaterializedEnsemble materialize(const EnsembleSpec& spec);

/// Default product truncation M for N gain entries: 32 N for geometric
/// families, N^2 for power families, N for explicit data.
std::size_t default_product_truncation(const EnsembleSpec& spec, std::size_t N);

// ---------------------------------------------------------------------------
// Target spectra
// ---------------------------------------------------------------------------

enum class TargetMode {
    mirror,          // lambda_n = -a_n
    zero,            // lambda_n = 0
    uniform_shift,   // lambda_n = s * a_n, s < 0
    explicit_values  // user-supplied
};

struct TargetSpec {
    TargetMode mode = TargetMode::mirror;
    double shift = -1.0;       // uniform_shift only
    std::vector<cplx> values;  // explicit_values only
};

std::string to_string(TargetMode mode);
TargetMode parse_target_mode(const std::string& text);

/// Placed poles lambda_1..lambda_L. lambda_0 = 0 is implicit and never stored.
struct TargetSpectrum {
    TargetSpec spec;
    std::vector<cplx> values;

    std::size_t size() const { return values.size(); }

    /// Estimate of sum_{m > M} |lambda_m| for the product tail.
    double tail_abs_sum(const MaterializedEnsemble& ens, std::size_t M) const;
};

/// Materialise targets to the ensemble length. Throws InvalidInput if any
/// target has positive real part or an explicit list is too short.
TargetSpectrum materialize_targets(const TargetSpec& spec, const MaterializedEnsemble& ens);

// ---------------------------------------------------------------------------
// Necessary conditions
// ---------------------------------------------------------------------------

enum class ViolationCode { duplicate_a, nonpositive_a, zero_b, not_decreasing };

std::string to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::size_t index;  // 1-based mode index
    std::string message;
};

struct ValidationReport {
    bool passed = true;
    std::vector<Violation> violations;
};

ValidationReport validate_necessary(const MaterializedEnsemble& ens);

}  // namespace ensplace
