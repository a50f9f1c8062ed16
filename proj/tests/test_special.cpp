#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "ensplace/error.hpp"
#include "ensplace/special.hpp"
#include "oracles.hpp"

using namespace ensplace;

namespace {

MaterializedEnsemble power_ensemble(double d, std::size_t M) {
    EnsembleSpec s;
    s.a = Power{d, 1.0};
    s.b = Power{0.0, 1.0};
    s.N = M;
    return materialize(s);
}

MaterializedEnsemble geometric_ensemble(double r, std::size_t M) {
    EnsembleSpec s;
    s.a = Geometric{r, 1.0};
    s.b = Geometric{0.8, 1.0};
    s.N = M;
    return materialize(s);
}

// Reference values, mpmath at 30 digits (nsum of the series).
struct Frozen {
    double d;
    double value;
};
constexpr Frozen kZeta[] = {
    {1.2, -5.4413980927026547693}, {1.5, -1.8137993642342178506}, {1.8, -0.55394754722338261706},
    {2.0, 0.0},                    {2.2, 0.45169283216028202592}, {3.0, 1.8137993642342178506},
    {3.5, 2.5053365399463165788},  {4.0, 3.1415926535897932385}, {5.0, 4.3240313298860498362},
};
constexpr Frozen kXi[] = {
    {1.5, 3.6275987284684357012}, {2.0, 3.1415926535897932385}, {3.0, 3.6275987284684357012},
    {5.0, 5.3447966605779755671}, {50.0, 50.032913840172314849},
};

}  // namespace

TEST_CASE("zeta at 2 vanishes") {
    const auto v = zeta(2.0, 1e-10);
    CHECK(std::abs(v.value) <= 1e-10);
    CHECK(v.tail_bound <= 1e-10);
}

TEST_CASE("zeta at 4 equals pi") {
    // 1/(16 m^2 - 1) = (1/(4m-1) - 1/(4m+1)) / 2 telescopes against the
    // Leibniz series to (1 - pi/4)/2, so zeta(4) = 4 - 4 (1 - pi/4) = pi.
    const auto v = zeta(4.0, 1e-9);
    CHECK(std::abs(v.value - std::numbers::pi) <= 1e-9);
    CHECK(std::abs(oracle::zeta_direct(4.0) - std::numbers::pi) <= 1e-12);
}

TEST_CASE("zeta matches frozen and brute-force references") {
    for (const auto& f : kZeta) {
        CAPTURE(f.d);
        const auto v = zeta(f.d, 1e-10);
        CHECK(std::abs(v.value - f.value) <= v.tail_bound + 1e-14);
        CHECK(v.tail_bound <= 1e-10);
        CHECK(std::abs(oracle::zeta_direct(f.d) - f.value) <= 1e-12);
    }
}

TEST_CASE("zeta is negative below 2") {
    CHECK(zeta(1.5, 1e-8).value < 0.0);
}

TEST_CASE("zeta sign and monotonicity on the grid") {
    const double grid[] = {1.2, 1.5, 1.8, 2.0, 2.2, 3.0, 5.0};
    double prev = -INFINITY;
    for (double d : grid) {
        CAPTURE(d);
        const auto v = zeta(d, 1e-12);
        CHECK(v.value > prev);
        prev = v.value;
        if (d < 2.0) CHECK(v.value + v.tail_bound < 0.0);
        if (d > 2.0) CHECK(v.value - v.tail_bound > 0.0);
    }
    // A finer sweep: strictly increasing.
    prev = zeta(1.05, 1e-10).value;
    for (double d = 1.1; d < 8.0; d += 0.1) {
        const double v = zeta(d, 1e-10).value;
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("zeta tail bound is honest") {
    for (double d : {1.2, 1.7, 2.0, 3.3, 6.0}) {
        CAPTURE(d);
        const auto coarse = zeta(d, 1e-6);
        const auto fine = zeta(d, 1e-12);
        CHECK(fine.terms_used >= coarse.terms_used);
        CHECK(std::abs(coarse.value - fine.value) <= coarse.tail_bound + fine.tail_bound);
        CHECK(std::abs(coarse.value - oracle::zeta_direct(d)) <= coarse.tail_bound + 1e-12);
    }
}

TEST_CASE("zeta limits") {
    CHECK(zeta(1.0 + 1e-3, 1e-6).value < -500.0);
    CHECK(zeta(200.0, 1e-8).value / 200.0 == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("zeta and xi reject bad arguments") {
    CHECK_THROWS_AS(zeta(1.0, 1e-8), InvalidInput);
    CHECK_THROWS_AS(zeta(0.5, 1e-8), InvalidInput);
    CHECK_THROWS_AS(zeta(1.0 + 1e-7, 1e-8), InvalidInput);
    CHECK_THROWS_AS(zeta(2.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(zeta(2.0, -1.0), InvalidInput);
    CHECK_THROWS_AS(xi(1.0, 1e-8), InvalidInput);
    CHECK_THROWS_AS(xi(2.0, 0.0), InvalidInput);
}

TEST_CASE("xi at 2 equals pi") {
    const auto v = xi(2.0, 1e-9);
    CHECK(std::abs(v.value - std::numbers::pi) <= 1e-9);
}

TEST_CASE("xi matches frozen and brute-force references") {
    for (const auto& f : kXi) {
        CAPTURE(f.d);
        const auto v = xi(f.d, 1e-9);
        CHECK(std::abs(v.value - f.value) <= v.tail_bound);
        CHECK(v.tail_bound <= 1e-9);
        CHECK(std::abs(oracle::xi_direct(f.d) - f.value) <= 1e-12);
    }
}

TEST_CASE("xi exceeds d and approaches d") {
    for (double d : {1.5, 2.0, 3.0, 5.0}) CHECK(xi(d, 1e-9).value > d);
    CHECK(std::abs(xi(50.0, 1e-8).value / 50.0 - 1.0) <= 0.01);
}

TEST_CASE("zeta and xi are fast") {
    const auto t0 = std::chrono::steady_clock::now();
    (void)zeta(2.0, 1e-10);
    (void)zeta(4.0, 1e-9);
    (void)xi(2.0, 1e-9);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    CHECK(dt.count() < 1.0);
}

TEST_CASE("alpha examples") {
    SUBCASE("inverse-square poles, n = 40") {
        const auto ens = power_ensemble(2.0, 4000);
        const auto v = alpha(ens, 40, 4000);
        CHECK(v.kind == DiagnosticKind::alpha);
        CHECK(v.n == 40);
        CHECK(v.inner_truncation == 4000);
        CHECK(std::abs(v.value) <= 0.15);
        CHECK(v.value == doctest::Approx(-0.0073297627989920261).epsilon(1e-9));
    }
    SUBCASE("single mode gives the empty sum") {
        CHECK(alpha(power_ensemble(2.0, 1), 1, 1).value == 0.0);
    }
    SUBCASE("geometric poles give a positive value") {
        const auto v = alpha(geometric_ensemble(0.5, 200), 10, 200);
        CHECK(v.value > 0.0);
        CHECK(v.value == doctest::Approx(2.8709452696710618904).epsilon(1e-12));
    }
    SUBCASE("preconditions") {
        const auto ens = power_ensemble(2.0, 10);
        CHECK_THROWS_AS(alpha(ens, 5, 4), InvalidInput);
        CHECK_THROWS_AS(alpha(ens, 2, 11), InvalidInput);
        CHECK_THROWS_AS(alpha(ens, 0, 5), InvalidInput);
    }
}

TEST_CASE("beta examples") {
    SUBCASE("zero targets give zero") {
        const auto ens = power_ensemble(2.0, 500);
        const auto t = materialize_targets(TargetSpec{TargetMode::zero, -1.0, {}}, ens);
        for (std::size_t n : {1u, 7u, 100u}) CHECK(beta(ens, t, n, 500).value == 0.0);
    }
    SUBCASE("two-term hand value") {
        EnsembleSpec s;
        s.a = ExplicitPoles{{0.5, 0.25}};
        s.b = Power{0.0, 1.0};
        s.N = 2;
        const auto ens = materialize(s);
        const auto t = materialize_targets(TargetSpec{TargetMode::mirror, -1.0, {}}, ens);
        const auto v = beta(ens, t, 1, 2);
        CHECK(v.kind == DiagnosticKind::beta);
        CHECK(v.value == doctest::Approx(std::log(2.0) + std::log(1.5)).epsilon(1e-14));
    }
    SUBCASE("cubic poles with lambda_n = -a_n / n decrease slowly") {
        const auto ens = power_ensemble(3.0, 100000);
        TargetSpec spec{TargetMode::explicit_values, -1.0, {}};
        for (std::size_t n = 1; n <= ens.size(); ++n) spec.values.push_back(-ens.a[n - 1] / static_cast<double>(n));
        const auto t = materialize_targets(spec, ens);
        const auto b30 = beta(ens, t, 30, 3000);
        CHECK(b30.value == doctest::Approx(1.6058011324653054461).epsilon(1e-10));
        double prev = b30.value;
        for (std::size_t n : {100u, 300u, 1000u}) {
            const double v = beta(ens, t, n, 100 * n).value;
            CHECK(v >= 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
    SUBCASE("preconditions") {
        const auto ens = power_ensemble(2.0, 10);
        const auto t = materialize_targets(TargetSpec{TargetMode::mirror, -1.0, {}}, ens);
        CHECK_THROWS_AS(beta(ens, t, 5, 4), InvalidInput);
        CHECK_THROWS_AS(beta(ens, t, 2, 11), InvalidInput);
    }
}

TEST_CASE("beta is nonnegative for left half-plane targets") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto ens = geometric_ensemble(0.6, 60);
    for (int trial = 0; trial < 50; ++trial) {
        TargetSpec spec{TargetMode::explicit_values, -1.0, {}};
        for (std::size_t n = 0; n < ens.size(); ++n)
            spec.values.push_back({-3.0 * u(rng) * ens.a[n], (u(rng) - 0.5) * 4.0 * ens.a[n]});
        const auto t = materialize_targets(spec, ens);
        for (std::size_t n = 1; n <= 60; n += 7) CHECK(beta(ens, t, n, 60).value >= 0.0);
    }
}

TEST_CASE("default inner truncation") {
    CHECK(default_inner_truncation(1) == 10000);
    CHECK(default_inner_truncation(100) == 10000);
    CHECK(default_inner_truncation(250) == 25000);
}
