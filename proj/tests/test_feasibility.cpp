#include <doctest.h>

#include <cmath>

#include "ensplace/error.hpp"
#include "ensplace/feasibility.hpp"
#include "ensplace/special.hpp"

using namespace ensplace;

namespace {

MaterializedEnsemble make(PoleFamily a, InputFamily b, std::size_t M) {
    EnsembleSpec s;
    s.a = std::move(a);
    s.b = std::move(b);
    s.N = M;
    return materialize(s);
}

}  // namespace

TEST_CASE("decay class examples") {
    SUBCASE("d = 1.5 poles tested at 1.75 are infeasible") {
        const auto ens = make(Power{1.5, 1.0}, Power{0.0, 1.0}, 200);
        const auto r = decay_class(ens, 1.75);
        CHECK(r.direction == Direction::increasing);
        CHECK(r.verdict == DecayVerdict::infeasible_item1);
        CHECK_FALSE(r.first_violation_index.has_value());
        CHECK(r.burn_in == 50);
        CHECK(r.window == 200);
        CHECK(r.zeta_at_d < 0.0);
    }
    SUBCASE("d = 3.5 poles with constant b tested at 2.5 are candidates") {
        const auto ens = make(Power{3.5, 1.0}, Power{0.0, 1.0}, 1024);
        const auto r = decay_class(ens, 2.5);
        CHECK(r.direction == Direction::decreasing);
        CHECK(r.logratio_ok);
        CHECK(r.max_logratio_slope <= 0.05);
        CHECK(r.verdict == DecayVerdict::feasible_item2_candidate);
        CHECK(r.zeta_at_d == doctest::Approx(zeta(2.5, 1e-10).value).epsilon(1e-12));
    }
    SUBCASE("geometric poles fail the log-ratio proxy") {
        const auto ens = make(Geometric{0.5, 1.0}, Geometric{0.8, 1.0}, 64);
        const auto r = decay_class(ens, 2.5);
        CHECK(r.direction == Direction::decreasing);
        CHECK_FALSE(r.logratio_ok);
        CHECK(r.max_logratio_slope == doctest::Approx(std::log(1.6)).epsilon(1e-9));
        CHECK(r.verdict == DecayVerdict::inconclusive);
    }
    SUBCASE("the critical exponent is inconclusive") {
        const auto ens = make(Power{1.5, 1.0}, Power{0.0, 1.0}, 200);
        CHECK(decay_class(ens, 2.0).verdict == DecayVerdict::inconclusive);
        CHECK(decay_class(ens, 2.0 - 5e-7).verdict == DecayVerdict::inconclusive);
    }
    SUBCASE("non-monotone window") {
        EnsembleSpec s;
        std::vector<double> a;
        for (std::size_t n = 1; n <= 40; ++n)
            a.push_back(std::pow(static_cast<double>(n), -2.0) * (1.0 + 0.2 * ((n % 2) ? 1.0 : -1.0)));
        s.a = ExplicitPoles{a};
        s.b = Power{0.0, 1.0};
        s.N = 40;
        const auto r = decay_class(materialize(s), 1.5);
        CHECK(r.direction == Direction::neither);
        REQUIRE(r.first_violation_index.has_value());
        CHECK(*r.first_violation_index > r.burn_in);
        CHECK(r.verdict == DecayVerdict::inconclusive);
    }
    SUBCASE("rejects d <= 1") {
        const auto ens = make(Power{1.5, 1.0}, Power{0.0, 1.0}, 10);
        CHECK_THROWS_AS(decay_class(ens, 1.0), InvalidInput);
    }
}

TEST_CASE("infeasible verdicts come with growing zero-target gains") {
    const auto ens = make(Power{1.5, 1.0}, Power{0.0, 1.0}, 2000);
    const auto window = ens.prefix(40);
    const auto r = decay_class(window, 1.75);
    REQUIRE(r.verdict == DecayVerdict::infeasible_item1);
    const auto g = gain_infinite(ens, materialize_targets(TargetSpec{TargetMode::zero, -1.0, {}}, ens), 40, 2000);
    if (g.finite()) {
        for (std::size_t n = 30; n < 40; ++n) CHECK(std::abs(g.entries[n]) > std::abs(g.entries[n - 1]));
    }
}

TEST_CASE("decay scan runs every grid point") {
    const auto ens = make(Power{3.5, 1.0}, Power{0.0, 1.0}, 256);
    const std::vector<double> grid{1.5, 2.5, 3.0, 4.0};
    const auto reps = decay_scan(ens, grid);
    REQUIRE(reps.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(reps[i].d_tested == grid[i]);
    CHECK(reps[3].direction == Direction::increasing);
    // d = 4 > 2 and increasing is neither verdict.
    CHECK(reps[3].verdict == DecayVerdict::inconclusive);
    for (const auto& r : reps)
        if (r.verdict == DecayVerdict::infeasible_item1) CHECK(r.d_tested < 2.0);
}

TEST_CASE("ratio test examples") {
    SUBCASE("geometric 0.5 / 0.8 passes") {
        const auto c = ratio_test(make(Geometric{0.5, 1.0}, Geometric{0.8, 1.0}, 32));
        CHECK(c.pass);
        CHECK(c.sup_a_ratio == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(c.inf_b_ratio == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(c.sup_b_ratio == doctest::Approx(0.8).epsilon(1e-12));
        REQUIRE(c.nu0);
        CHECK(c.sup_a_ratio < *c.nu0);
        CHECK(*c.nu0 < *c.nu1);
        CHECK(*c.nu1 < c.inf_b_ratio);
        CHECK(c.sup_b_ratio < *c.nu2);
        CHECK(*c.nu2 < 1.0);
    }
    SUBCASE("b decaying faster than a fails") {
        CHECK_FALSE(ratio_test(make(Geometric{0.5, 1.0}, Geometric{0.4, 1.0}, 32)).pass);
    }
    SUBCASE("constant b fails") {
        const auto c = ratio_test(make(Geometric{0.5, 1.0}, Power{0.0, 1.0}, 32));
        CHECK_FALSE(c.pass);
        CHECK_FALSE(c.nu0.has_value());
    }
    SUBCASE("needs two modes") {
        CHECK_THROWS_AS(ratio_test(make(Geometric{0.5, 1.0}, Power{0.0, 1.0}, 1)), InvalidInput);
    }
}

TEST_CASE("phi decay certificate examples") {
    const auto ens = make(Geometric{0.5, 1.0}, Geometric{0.8, 1.0}, 32);
    const auto phi = phi_matrix(ens, 32);
    SUBCASE("explicit constants") {
        RatioCertificate rc;
        rc.nu0 = 0.55;
        rc.nu1 = 0.75;
        rc.nu2 = 0.85;
        rc.pass = true;
        const auto c = phi_decay_certificate(phi, rc);
        CHECK(c.mu == doctest::Approx(0.85).epsilon(1e-15));
        CHECK(c.C == 1.0);
        CHECK(c.pass);
        CHECK(c.max_violation <= 0.0);
        CHECK(c.kappa == doctest::Approx(1.85 / 0.15).epsilon(1e-12));
    }
    SUBCASE("single mode passes vacuously") {
        const auto c = phi_decay_certificate(phi_matrix(ens, 1), 1.0, 0.5);
        CHECK(c.pass);
        CHECK(c.max_violation == doctest::Approx(-0.5));
    }
    SUBCASE("too fast a decay rate fails") {
        const auto c = phi_decay_certificate(phi, 1.0, 0.1);
        CHECK_FALSE(c.pass);
        CHECK(c.max_violation > 0.0);
        CHECK(c.max_violation >= 0.8 / 1.5 - 0.1 - 1e-12);
    }
    SUBCASE("fails cleanly without a passing ratio certificate") {
        CHECK_THROWS_AS(phi_decay_certificate(phi, RatioCertificate{}), InvalidInput);
        CHECK_THROWS_AS(phi_decay_certificate(phi, 1.0, 1.0), InvalidInput);
        CHECK_THROWS_AS(phi_decay_certificate(phi, 0.0, 0.5), InvalidInput);
    }
}

TEST_CASE("kappa bounds the row and column sums of phi") {
    for (double r : {0.3, 0.5, 0.6}) {
        for (double beta : {0.7, 0.8, 0.9}) {
            const auto ens = make(Geometric{r, 1.0}, Geometric{beta, 1.0}, 48);
            const auto rc = ratio_test(ens);
            if (!rc.pass) continue;
            const auto c = phi_decay_certificate(phi_matrix(ens, 48), rc);
            CAPTURE(r);
            CAPTURE(beta);
            CHECK(c.pass);
            CHECK(c.kappa == doctest::Approx(c.C * (1.0 + c.mu) / (1.0 - c.mu)).epsilon(1e-12));
            CHECK(c.max_row_sum <= c.kappa);
            CHECK(c.max_col_sum <= c.kappa);
        }
    }
}

TEST_CASE("pi bound examples") {
    SUBCASE("two modes") {
        const auto ens = make(Geometric{0.5, 1.0}, Power{0.0, 1.0}, 2);
        const auto chk = pi_bound_check(pi_sequence(ens, 2, 2), 0.5);
        CHECK(chk.bound == doctest::Approx(std::log(2.0) + 8.0).epsilon(1e-14));
        CHECK(chk.max_log_pi == doctest::Approx(std::log(6.0)).epsilon(1e-14));
        CHECK(chk.pass);
    }
    SUBCASE("single mode") {
        const auto ens = make(Geometric{0.5, 1.0}, Power{0.0, 1.0}, 1);
        for (double nu0 : {0.01, 0.5, 0.99}) CHECK(pi_bound_check(pi_sequence(ens, 1, 1), nu0).pass);
    }
    SUBCASE("slowly decaying geometric poles") {
        const auto ens = make(Geometric{0.9, 1.0}, Geometric{0.95, 1.0}, 640);
        const auto chk = pi_bound_check(pi_sequence(ens, 20, 640), 0.95);
        CHECK(chk.bound == doctest::Approx(std::log(2.0) + 4.0 * 0.95 / 0.0025).epsilon(1e-12));
        CHECK(chk.pass);
    }
    SUBCASE("rejects nu0 outside (0,1)") {
        const auto ens = make(Geometric{0.5, 1.0}, Power{0.0, 1.0}, 2);
        CHECK_THROWS_AS(pi_bound_check(pi_sequence(ens, 2, 2), 1.0), InvalidInput);
    }
}

TEST_CASE("a passing ratio test implies the whole sufficient chain") {
    for (double r : {0.2, 0.4, 0.5, 0.6}) {
        for (double beta : {0.65, 0.8, 0.9}) {
            const auto ens = make(Geometric{r, 1.0}, Geometric{beta, 1.0}, 32 * 24);
            const auto rc = ratio_test(ens.prefix(24));
            if (!rc.pass) continue;
            CAPTURE(r);
            CAPTURE(beta);
            CHECK(phi_decay_certificate(phi_matrix(ens, 24), rc).pass);
            CHECK(pi_bound_check(pi_sequence(ens, 24, ens.size()), *rc.nu0).pass);
        }
    }
}

TEST_CASE("targets within hypotheses") {
    const auto ens = make(Power{3.5, 1.0}, Power{0.0, 1.0}, 64);
    CHECK(targets_within_hypotheses(ens, materialize_targets(TargetSpec{TargetMode::zero, -1.0, {}}, ens), 64));
    CHECK_FALSE(
        targets_within_hypotheses(ens, materialize_targets(TargetSpec{TargetMode::mirror, -1.0, {}}, ens), 64));
    TargetSpec shrinking{TargetMode::explicit_values, -1.0, {}};
    for (std::size_t n = 1; n <= 64; ++n) shrinking.values.push_back(-ens.a[n - 1] / static_cast<double>(n));
    CHECK(targets_within_hypotheses(ens, materialize_targets(shrinking, ens), 64));
    CHECK_THROWS_AS(
        targets_within_hypotheses(ens, materialize_targets(TargetSpec{TargetMode::zero, -1.0, {}}, ens), 65),
        InvalidInput);
}

TEST_CASE("assess phrases conclusions for the window only") {
    const auto ens = make(Geometric{0.5, 1.0}, Geometric{0.8, 1.0}, 512);
    const auto t = materialize_targets(TargetSpec{TargetMode::mirror, -1.0, {}}, ens);
    const std::vector<double> grid{1.5, 2.5};
    const auto rep = assess(ens, t, 16, 512, grid);
    CHECK(rep.N == 16);
    CHECK(rep.M == 512);
    CHECK(rep.decay.size() == 2);
    CHECK(rep.ratio.pass);
    REQUIRE(rep.phi_decay);
    CHECK(rep.phi_decay->pass);
    REQUIRE(rep.pi_bound);
    CHECK(rep.pi_bound->pass);
    bool window_text = false;
    for (const auto& c : rep.conclusions) window_text |= c.find("hypotheses verified on window [1, 16]") != std::string::npos;
    CHECK(window_text);

    const auto flat = make(Power{1.5, 1.0}, Power{0.0, 1.0}, 256);
    const auto rep2 = assess(flat, materialize_targets(TargetSpec{TargetMode::zero, -1.0, {}}, flat), 128, 256,
                             std::vector<double>{1.8});
    CHECK_FALSE(rep2.ratio.pass);
    CHECK_FALSE(rep2.phi_decay.has_value());
    CHECK(rep2.decay[0].verdict == DecayVerdict::infeasible_item1);
}
