#include "ensplace/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ensplace/error.hpp"
#include "ensplace/kernels.hpp"

namespace ensplace {

namespace {

constexpr double kPoleGuard = 1e-12;
constexpr std::size_t kMaxSamples = std::size_t{1} << 16;
constexpr double kSnapDistance = 0.1;

void check_triplet(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k) {
    if (b.size() != a.size() || k.size() != a.size()) throw InvalidInput("a, b and k must have the same length");
}

std::vector<cplx> kb_products(std::span<const cplx> b, std::span<const cplx> k) {
    std::vector<cplx> kb(b.size());
    for (std::size_t n = 0; n < b.size(); ++n) kb[n] = k[n] * b[n];
    return kb;
}

struct WindingPass {
    double raw = 0.0;
    double min_abs_h = 0.0;
};

WindingPass winding_pass(std::span<const double> a, std::span<const cplx> kb, const Contour& c, std::size_t samples) {
    std::vector<cplx> z(samples);
    for (std::size_t j = 0; j < samples; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(samples);
        z[j] = c.center + std::polar(c.radius, theta);
    }
    std::vector<cplx> h(samples);
    kernels::omp::h_samples(a, kb, z, h);

    WindingPass pass;
    pass.min_abs_h = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        pass.min_abs_h = std::min(pass.min_abs_h, std::abs(h[j]));
        total += std::arg(h[(j + 1) % samples] / h[j]);
    }
    pass.raw = total / (2.0 * std::numbers::pi);
    return pass;
}

std::optional<int> snap(double raw) {
    const double r = std::round(raw);
    if (std::abs(raw - r) < kSnapDistance) return static_cast<int>(r);
    return std::nullopt;
}

}  // namespace

ClosedLoopOperator closed_loop(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k) {
    check_triplet(a, b, k);
    const std::size_t N = a.size();
    ClosedLoopOperator op;
    op.a.assign(a.begin(), a.end());
    op.b.assign(b.begin(), b.end());
    op.k.assign(k.begin(), k.end());
    op.T = ComplexMatrix(N, N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) op.T(i, j) = b[i] * k[j];
        op.T(i, i) += a[i];
    }

    // Rank <= 1 of T - Diag(a): every 2x2 minor through the largest entry
    // must vanish.
    ComplexMatrix D = op.T;
    for (std::size_t i = 0; i < N; ++i) D(i, i) -= a[i];
    std::size_t p = 0, q = 0;
    double peak = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (std::abs(D(i, j)) > peak) {
                peak = std::abs(D(i, j));
                p = i;
                q = j;
            }
    if (peak > 0.0) {
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) {
                const cplx lhs = D(i, j) * D(p, q);
                const cplx rhs = D(i, q) * D(p, j);
                const double scale = std::abs(lhs) + std::abs(rhs);
                if (scale > 0.0) op.rank_one_defect = std::max(op.rank_one_defect, std::abs(lhs - rhs) / scale);
            }
        }
    }
    return op;
}

cplx h_eval(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k, cplx z) {
    check_triplet(a, b, k);
    cplx acc{1.0, 0.0};
    for (std::size_t n = 0; n < a.size(); ++n) {
        if (std::abs(z - a[n]) < kPoleGuard * std::abs(a[n])) {
            std::ostringstream os;
            os << "h_k evaluated at a pole: z is within " << kPoleGuard << " a_n of a_" << n + 1;
            throw NumericError(os.str());
        }
        acc += k[n] * b[n] / (a[n] - z);
    }
    return acc;
}

WindingResult winding(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k,
                      const Contour& contour) {
    check_triplet(a, b, k);
    if (!(contour.radius > 0.0)) throw InvalidInput("contour radius must be positive");
    if (contour.samples < 256) throw InvalidInput("winding needs at least 256 samples");
    const std::vector<cplx> kb = kb_products(b, k);
    for (std::size_t n = 0; n < a.size(); ++n) {
        if (kb[n] == cplx{}) continue;  // removable: not a pole of h
        const double gap = std::abs(std::abs(cplx(a[n]) - contour.center) - contour.radius);
        if (gap < 1e-9 * contour.radius) {
            throw NumericError("contour passes through the pole a_" + std::to_string(n + 1));
        }
    }

    std::size_t samples = contour.samples;
    WindingPass prev = winding_pass(a, kb, contour, samples);
    while (samples < kMaxSamples) {
        samples *= 2;
        const WindingPass cur = winding_pass(a, kb, contour, samples);
        const auto s_prev = snap(prev.raw);
        const auto s_cur = snap(cur.raw);
        if (s_prev && s_cur && *s_prev == *s_cur) {
            WindingResult res;
            res.contour = contour;
            res.contour.samples = samples;
            res.winding = *s_cur;
            res.raw = cur.raw;
            res.min_abs_h = cur.min_abs_h;
            return res;
        }
        prev = cur;
    }
    std::ostringstream os;
    os << "winding number did not snap to an integer (raw " << prev.raw << ", min |h| " << prev.min_abs_h << " at "
       << samples << " samples)";
    throw NumericError(os.str());
}

double eigvec_residual(const ClosedLoopOperator& op, cplx lambda) {
    const std::size_t N = op.size();
    std::vector<cplx> v(N);
    std::optional<std::size_t> open_loop;
    for (std::size_t n = 0; n < N; ++n)
        if (std::abs(lambda - op.a[n]) <= kPoleGuard * op.a[n]) open_loop = n;

    if (open_loop) {
        v[*open_loop] = 1.0;
    } else {
        cplx kv{};
        for (std::size_t n = 0; n < N; ++n) {
            v[n] = op.b[n] / (op.a[n] - lambda);
            kv += op.k[n] * v[n];
        }
        if (std::abs(kv) < 1e-12) throw NumericError("eigenvector not normalisable: |k . v| < 1e-12");
    }

    double vmax = 0.0;
    for (const auto& x : v) vmax = std::max(vmax, std::abs(x));
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        cplx tv{};
        for (std::size_t j = 0; j < N; ++j) tv += op.T(i, j) * v[j];
        worst = std::max(worst, std::abs(tv - lambda * v[i]));
    }
    return worst / vmax;
}

double eigvec_residual(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k, cplx lambda) {
    return eigvec_residual(closed_loop(a, b, k), lambda);
}

std::vector<cplx> closed_loop_eigenvector(std::span<const double> a, std::span<const cplx> b, std::span<const cplx> k,
                                          cplx lambda) {
    check_triplet(a, b, k);
    std::vector<cplx> v(a.size());
    cplx kv{};
    for (std::size_t n = 0; n < a.size(); ++n) {
        v[n] = b[n] / (a[n] - lambda);
        kv += k[n] * v[n];
    }
    if (std::abs(kv) < 1e-12) throw NumericError("eigenvector not normalisable: |k . v| < 1e-12");
    for (auto& x : v) x *= -1.0 / kv;
    return v;
}

CauchyOperator build_cauchy(const MaterializedEnsemble& ens, const PiSequence& pi) {
    const std::size_t N = pi.size();
    if (N < 1 || N > ens.size()) throw InvalidInput("build_cauchy: pi length out of range");
    if (!pi.diverged.empty()) throw NumericError("build_cauchy: pi sequence diverged");
    CauchyOperator op;
    op.pi = pi.values;
    op.P = RealMatrix(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) op.P(i, j) = ens.a[j] * pi.values[j] / (ens.a[i] + ens.a[j]);
    op.involution_residual = max_abs_diff(kernels::omp::matmul(op.P, op.P), RealMatrix::identity(N));
    return op;
}

TransformedGenerator transformed_generator(std::span<const double> a, std::span<const cplx> b,
                                           std::span<const cplx> k) {
    check_triplet(a, b, k);
    const std::size_t N = a.size();
    TransformedGenerator tg;
    tg.k_tilde = kb_products(b, k);
    tg.T_tilde = ComplexMatrix(N, N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) tg.T_tilde(i, j) = tg.k_tilde[j];
        tg.T_tilde(i, i) += a[i];
    }
    const ClosedLoopOperator op = closed_loop(a, b, k);
    ComplexMatrix similar(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) similar(i, j) = op.T(i, j) * b[j] / b[i];
    const double scale = std::max(max_abs(tg.T_tilde), std::numeric_limits<double>::min());
    tg.similarity_residual = max_abs_diff(tg.T_tilde, similar) / scale;
    return tg;
}

double diagonalization_residual(const CauchyOperator& P, const MaterializedEnsemble& ens, const GainVector& gain) {
    const std::size_t N = P.size();
    if (gain.size() != N || ens.size() < N) throw InvalidInput("diagonalization_residual: size mismatch");
    const auto a = std::span(ens.a).first(N);
    const auto b = std::span(ens.b).first(N);
    const TransformedGenerator tg = transformed_generator(a, b, gain.entries);
    ComplexMatrix Pc(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) Pc(i, j) = P.P(i, j);
    ComplexMatrix R = kernels::omp::matmul(kernels::omp::matmul(Pc, tg.T_tilde), Pc);
    for (std::size_t i = 0; i < N; ++i) R(i, i) += a[i];
    return max_abs(R);
}

TruncatedSpectrumReport verify_truncated_spectrum(const MaterializedEnsemble& ens, const TargetSpectrum& targets,
                                                  std::size_t N, std::size_t N_gain, double tolerance) {
    if (N < 1 || N > ens.size() || N > targets.size()) throw InvalidInput("verify: N out of range");
    if (N_gain > N) throw InvalidInput("verify: N_gain must not exceed N");

    const auto a = std::span(ens.a).first(N);
    const auto b = std::span(ens.b).first(N);
    const auto lambda = std::span(targets.values).first(N);

    std::vector<cplx> k(N);
    if (N_gain > 0) {
        const GainVector g = ackermann_finite(a.first(N_gain), b.first(N_gain), lambda.first(N_gain));
        std::copy(g.entries.begin(), g.entries.end(), k.begin());
    }
    const ClosedLoopOperator op = closed_loop(a, b, k);

    TruncatedSpectrumReport rep;
    rep.N = N;
    rep.N_gain = N_gain;
    auto fail = [&](std::size_t n, const std::string& what) {
        rep.failures.push_back("mode " + std::to_string(n) + ": " + what);
    };

    for (std::size_t n = 1; n <= N; ++n) {
        ModeCheck mc;
        mc.n = n;
        mc.placed = n <= N_gain;
        mc.eigenvalue = mc.placed ? lambda[n - 1] : cplx(a[n - 1]);
        try {
            mc.residual = eigvec_residual(op, mc.eigenvalue);
        } catch (const NumericError& e) {
            mc.residual = std::numeric_limits<double>::infinity();
            fail(n, e.what());
        }
        mc.ok = mc.residual <= tolerance;
        if (!mc.ok && std::isfinite(mc.residual)) fail(n, "eigenvector residual above tolerance");

        if (mc.placed) {
            // Zeros of h_k at this target, counted with multiplicity.
            int multiplicity = 0;
            double radius = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < N_gain; ++m) {
                const double dist = std::abs(lambda[m] - mc.eigenvalue);
                if (dist == 0.0) {
                    ++multiplicity;
                } else {
                    radius = std::min(radius, dist);
                }
            }
            for (std::size_t m = 0; m < N; ++m) radius = std::min(radius, std::abs(cplx(a[m]) - mc.eigenvalue));
            if (!std::isfinite(radius)) radius = std::max(1.0, std::abs(mc.eigenvalue));
            if (radius > 0.0) {
                try {
                    mc.winding = winding(a, b, k, {mc.eigenvalue, 0.4 * radius, 256});
                    if (mc.winding->winding != multiplicity) {
                        mc.ok = false;
                        fail(n, "winding " + std::to_string(mc.winding->winding) + " != expected " +
                                    std::to_string(multiplicity));
                    }
                } catch (const NumericError& e) {
                    mc.ok = false;
                    fail(n, e.what());
                }
            }
        }
        rep.modes.push_back(std::move(mc));
    }
    rep.passed = rep.failures.empty();
    return rep;
}

}  // namespace ensplace
