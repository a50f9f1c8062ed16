#include "ensplace/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ensplace/error.hpp"

namespace ensplace {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput(what);
}

}  // namespace

SpaceTag SpaceTag::lp(double p) {
    require(std::isfinite(p) && p >= 1.0, "lp space needs p >= 1");
    return {Kind::lp, p};
}

std::string to_string(const SpaceTag& space) {
    switch (space.kind) {
        case SpaceTag::Kind::lp: {
            std::ostringstream os;
            os << "l" << space.p;
            return os.str();
        }
        case SpaceTag::Kind::l_infinity: return "linf";
        case SpaceTag::Kind::c: return "c";
        case SpaceTag::Kind::c_zero: return "c0";
    }
    return "?";
}

SpaceTag parse_space(const std::string& text) {
    if (text == "linf" || text == "l_infinity") return SpaceTag::l_infinity();
    if (text == "c") return SpaceTag::convergent();
    if (text == "c0" || text == "c_zero") return SpaceTag::null_sequences();
    if (text.size() > 1 && text[0] == 'l') {
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(text.substr(1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == text.size() - 1) return SpaceTag::lp(p);
    }
    throw InvalidInput("unknown space '" + text + "' (expected l<p>, linf, c or c0)");
}

double norm(std::span<const cplx> x, const SpaceTag& space) {
    double peak = 0.0;
    for (const auto& v : x) peak = std::max(peak, std::abs(v));
    if (space.kind != SpaceTag::Kind::lp || peak == 0.0) return peak;
    // Scale by the peak so large or tiny entries do not over/underflow in |x|^p.
    double acc = 0.0;
    for (const auto& v : x) acc += std::pow(std::abs(v) / peak, space.p);
    return peak * std::pow(acc, 1.0 / space.p);
}

MaterializedEnsemble MaterializedEnsemble::prefix(std::size_t n) const {
    require(n >= 1 && n <= size(), "prefix length out of range");
    MaterializedEnsemble out;
    out.a.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
    out.b.assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(n));
    out.space = space;
    out.family = family;
    return out;
}

double MaterializedEnsemble::tail_sum_a(std::size_t M) const {
    const std::size_t L = size();
    double stored = 0.0;
    for (std::size_t m = std::min(M, L); m < L; ++m) stored += a[m];
    const std::size_t from = std::max(M, L);  // sum over m > from, 1-based
    const double beyond = std::visit(
        overloaded{
            [&](const Geometric& g) {
                return g.scale * std::pow(g.ratio, static_cast<double>(from + 1)) / (1.0 - g.ratio);
            },
            [&](const Power& p) {
                const double x = static_cast<double>(from) + 0.5;
                return p.scale * std::pow(x, 1.0 - p.exponent) / (p.exponent - 1.0);
            },
            [&](const ExplicitPoles&) {
                if (L < 2) return 0.0;
                const double q = a[L - 1] / a[L - 2];
                if (!(q > 0.0 && q < 1.0)) return std::numeric_limits<double>::infinity();
                return a[L - 1] * q / (1.0 - q);
            }},
        family);
    return stored + beyond;
}

MaterializedEnsemble materialize(const EnsembleSpec& spec) {
    require(spec.N >= 1, "truncation N must be >= 1");
    if (spec.space.kind == SpaceTag::Kind::lp) require(spec.space.p >= 1.0, "lp space needs p >= 1");
    const std::size_t N = spec.N;

    MaterializedEnsemble ens;
    ens.space = spec.space;
    ens.family = spec.a;
    ens.a.resize(N);
    ens.b.resize(N);

    std::visit(overloaded{
                   [&](const Geometric& g) {
                       require(g.ratio > 0.0 && g.ratio < 1.0, "geometric ratio r must lie in (0,1)");
                       require(g.scale > 0.0, "geometric scale must be positive");
                       for (std::size_t n = 0; n < N; ++n)
                           ens.a[n] = g.scale * std::pow(g.ratio, static_cast<double>(n + 1));
                   },
                   [&](const Power& p) {
                       require(p.exponent > 1.0, "power exponent d must be > 1");
                       require(p.scale > 0.0, "power scale must be positive");
                       for (std::size_t n = 0; n < N; ++n)
                           ens.a[n] = p.scale * std::pow(static_cast<double>(n + 1), -p.exponent);
                   },
                   [&](const ExplicitPoles& e) {
                       require(e.values.size() == N, "explicit a list length must equal N");
                       ens.a = e.values;
                   }},
               spec.a);

    std::visit(overloaded{
                   [&](const Geometric& g) {
                       require(g.ratio > 0.0, "geometric b ratio must be positive");
                       require(g.scale != 0.0, "b scale must be nonzero");
                       for (std::size_t n = 0; n < N; ++n)
                           ens.b[n] = g.scale * std::pow(g.ratio, static_cast<double>(n + 1));
                   },
                   [&](const Power& p) {
                       require(p.exponent >= 0.0, "b power exponent must be >= 0");
                       require(p.scale != 0.0, "b scale must be nonzero");
                       for (std::size_t n = 0; n < N; ++n)
                           ens.b[n] = p.scale * std::pow(static_cast<double>(n + 1), -p.exponent);
                   },
                   [&](const ExplicitInputs& e) {
                       require(e.values.size() == N, "explicit b list length must equal N");
                       ens.b = e.values;
                   }},
               spec.b);
    return ens;
}

std::size_t default_product_truncation(const EnsembleSpec& spec, std::size_t N) {
    return std::visit(overloaded{[&](const Geometric&) { return 32 * N; },
                                 [&](const Power&) { return std::max<std::size_t>(N * N, N); },
                                 [&](const ExplicitPoles& e) { return std::max(N, e.values.size()); }},
                      spec.a);
}

std::string to_string(TargetMode mode) {
    switch (mode) {
        case TargetMode::mirror: return "mirror";
        case TargetMode::zero: return "zero";
        case TargetMode::uniform_shift: return "uniform_shift";
        case TargetMode::explicit_values: return "explicit";
    }
    return "?";
}

TargetMode parse_target_mode(const std::string& text) {
    if (text == "mirror") return TargetMode::mirror;
    if (text == "zero") return TargetMode::zero;
    if (text == "uniform_shift" || text == "shift") return TargetMode::uniform_shift;
    if (text == "explicit") return TargetMode::explicit_values;
    throw InvalidInput("unknown target mode '" + text + "'");
}

double TargetSpectrum::tail_abs_sum(const MaterializedEnsemble& ens, std::size_t M) const {
    switch (spec.mode) {
        case TargetMode::mirror: return ens.tail_sum_a(M);
        case TargetMode::zero: return 0.0;
        case TargetMode::uniform_shift: return std::abs(spec.shift) * ens.tail_sum_a(M);
        case TargetMode::explicit_values: {
            const std::size_t L = std::min(size(), ens.size());
            double stored = 0.0;
            for (std::size_t m = std::min(M, L); m < L; ++m) stored += std::abs(values[m]);
            if (L == 0) return stored;
            // Beyond the list, assume |lambda_m| / a_m stays at its last value.
            const double rho = std::abs(values[L - 1]) / ens.a[L - 1];
            const double beyond = rho * ens.tail_sum_a(std::max(M, L));
            return stored + beyond;
        }
    }
    return 0.0;
}

TargetSpectrum materialize_targets(const TargetSpec& spec, const MaterializedEnsemble& ens) {
    TargetSpectrum t;
    t.spec = spec;
    const std::size_t L = ens.size();
    t.values.resize(L);
    switch (spec.mode) {
        case TargetMode::mirror:
            for (std::size_t n = 0; n < L; ++n) t.values[n] = -ens.a[n];
            break;
        case TargetMode::zero: break;
        case TargetMode::uniform_shift:
            require(spec.shift < 0.0, "uniform_shift needs s < 0");
            for (std::size_t n = 0; n < L; ++n) t.values[n] = spec.shift * ens.a[n];
            break;
        case TargetMode::explicit_values:
            require(spec.values.size() >= L, "explicit target list shorter than the ensemble");
            t.values.assign(spec.values.begin(), spec.values.begin() + static_cast<std::ptrdiff_t>(L));
            break;
    }
    for (std::size_t n = 0; n < L; ++n) {
        if (t.values[n].real() > 0.0) {
            throw InvalidInput("target lambda_" + std::to_string(n + 1) +
                               " has positive real part (must lie in the closed left half-plane)");
        }
    }
    return t;
}

std::string to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::duplicate_a: return "duplicate_a";
        case ViolationCode::nonpositive_a: return "nonpositive_a";
        case ViolationCode::zero_b: return "zero_b";
        case ViolationCode::not_decreasing: return "not_decreasing";
    }
    return "?";
}

ValidationReport validate_necessary(const MaterializedEnsemble& ens) {
    ValidationReport report;
    auto add = [&](ViolationCode code, std::size_t index, std::string msg) {
        report.violations.push_back({code, index, std::move(msg)});
    };
    const std::size_t L = ens.size();

    for (std::size_t n = 0; n < L; ++n) {
        if (!(ens.a[n] > 0.0)) add(ViolationCode::nonpositive_a, n + 1, "a_n must be positive");
    }

    // Pairwise distinctness: sort indices by value, flag the later index of
    // every equal pair.
    std::vector<std::size_t> order(L);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return ens.a[i] < ens.a[j]; });
    std::vector<bool> duplicate(L, false);
    for (std::size_t i = 1; i < L; ++i) {
        if (ens.a[order[i]] == ens.a[order[i - 1]]) {
            duplicate[std::max(order[i], order[i - 1])] = true;
        }
    }
    for (std::size_t n = 0; n < L; ++n) {
        if (duplicate[n]) add(ViolationCode::duplicate_a, n + 1, "a_n repeats an earlier value");
    }

    for (std::size_t n = 1; n < L; ++n) {
        if (ens.a[n] > ens.a[n - 1]) add(ViolationCode::not_decreasing, n + 1, "a_n exceeds a_{n-1}");
    }

    for (std::size_t n = 0; n < ens.b.size(); ++n) {
        if (ens.b[n] == cplx{0.0, 0.0}) add(ViolationCode::zero_b, n + 1, "b_n must be nonzero");
    }

    std::stable_sort(report.violations.begin(), report.violations.end(),
                     [](const Violation& x, const Violation& y) { return x.index < y.index; });
    report.passed = report.violations.empty();
    return report;
}

}  // namespace ensplace
