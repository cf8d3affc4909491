#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pendrot/error.hpp"
#include "pendrot/scattering.hpp"

using namespace pendrot;

namespace {
ReducedParams mu_params(double mu, double eps = 0.0) { return ReducedParams::canonical(mu, 1.0, eps); }
}  // namespace

TEST_CASE("criterion parsing round-trips") {
    for (const auto& c : {TauCriterion::down(), TauCriterion::up(), TauCriterion::minimal_abs(),
                          TauCriterion::branch(0), TauCriterion::branch(-3), TauCriterion::extended(2)}) {
        CHECK(parse_criterion(c.name()) == c);
    }
    CHECK(parse_criterion("branch=1") == TauCriterion::branch(1));
    CHECK_THROWS_AS(parse_criterion("branch="), Error);
    CHECK_THROWS_AS(parse_criterion("sideways"), Error);
}

TEST_CASE("closed-form potential matches quadrature") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uI(-5.0, 5.0), ua(0.0, 2 * kPi), uc(-2.0, 2.0);
    for (int i = 0; i < 60; ++i) {
        ReducedParams p = mu_params(1.0);
        p.a1 = uc(rng);
        p.a2 = uc(rng);
        if (i % 3 == 0) {
            p.r_num = 1;
            p.r_den = 2;
        }
        const double I = uI(rng), phi = ua(rng), s = ua(rng);
        const double closed = melnikov_closed(I, phi, s, p);
        CHECK(std::abs(melnikov_quadrature(I, phi, s, p) - closed) < 1e-10);
        CHECK(std::abs(melnikov_integral_literal(I, phi, s, p) + closed) < 1e-10);
    }
}

TEST_CASE("closed-form potential matches a Simpson oracle") {
    const ReducedParams p = mu_params(0.5);
    for (double I : {-2.0, 0.0, 0.3, 1.0, 2.5}) {
        const double phi = 0.7, s = 1.9;
        // ℒ = A1 cos φ + A2 cos(φ − s) with A = a·∫2sech²σ cos(ωσ)dσ
        const double want = p.a1 * oracle::sech2_cos_integral(I) * std::cos(phi) +
                            p.a2 * oracle::sech2_cos_integral(I - 1.0) * std::cos(phi - s);
        CHECK(melnikov_closed(I, phi, s, p) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("tau star vanishes at theta = pi on the odd branch") {
    for (double mu : {0.15, 0.5, 3.0}) {
        const auto p = mu_params(mu);
        for (double I : {-2.0, -0.5, 0.2, 0.5, 0.9, 1.3, 3.0}) {
            if (classify(I, p) != CrestKind::Horizontal) continue;
            const auto sol = solve_tau_star(I, kPi, TauCriterion::branch(1), p);
            CHECK(std::abs(sol.tau_star) < 1e-12);
        }
    }
}

TEST_CASE("solutions lie on the crest branch they report") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uI(-4.0, 4.0), ut(0.0, 2 * kPi), umu(0.05, 5.0);
    const TauCriterion crits[] = {TauCriterion::down(), TauCriterion::up(), TauCriterion::minimal_abs(),
                                  TauCriterion::branch(1), TauCriterion::extended(1)};
    int solved = 0;
    for (int i = 0; i < 300; ++i) {
        const auto p = mu_params(umu(rng));
        const double I = uI(rng), theta = ut(rng);
        if (classify(I, p) == CrestKind::Singular) continue;
        for (const auto& c : crits) {
            try {
                const auto sol = solve_tau_star(I, theta, c, p);
                CHECK(std::abs(ray_residual(I, theta, sol.tau_star, p)) < 1e-10);
                CHECK(std::abs(crest_residual(I, sol.phi, sol.sigma, p)) < 1e-10);
                if (c.kind == CriterionKind::Down) CHECK(sol.tau_star <= 0.0);
                if (c.kind == CriterionKind::Up) CHECK(sol.tau_star >= 0.0);
                if (c.kind == CriterionKind::Branch) CHECK(sol.branch_hit.k == c.k);
                ++solved;
            } catch (const Error& e) {
                const bool expected = e.code() == ErrorCode::UnreachableBranch ||
                                      e.code() == ErrorCode::TangencyDegenerate;
                CHECK(expected);
            }
        }
    }
    CHECK(solved > 1000);
}

TEST_CASE("minimal |tau| agrees with a brute-force ray scan") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> uI(-3.0, 3.0), ut(0.0, 2 * kPi), umu(0.1, 3.0);
    int compared = 0;
    for (int i = 0; i < 150; ++i) {
        const auto p = mu_params(umu(rng));
        const double I = uI(rng), theta = ut(rng);
        if (classify(I, p) == CrestKind::Singular) continue;
        TauSolution sol;
        try {
            sol = solve_tau_star(I, theta, TauCriterion::minimal_abs(), p);
        } catch (const Error&) {
            continue;
        }
        if (sol.degenerate || sol.ambiguous) continue;
        const auto w = crest_weights(I, p);
        const double tmax = tau_max_default(I, p);
        double best = std::numeric_limits<double>::infinity();
        for (int dir : {-1, 1}) {
            auto hits = oracle::ray_scan(I, theta, 1.0, w.w1, w.w2, dir, 1e-4, tmax,
                                         [](const oracle::BruteCrossing&) { return true; });
            if (!hits.empty() && std::abs(hits[0].tau) < std::abs(best)) best = hits[0].tau;
        }
        REQUIRE(std::isfinite(best));
        CHECK(std::abs(best - sol.tau_star) < 1e-6);
        ++compared;
    }
    CHECK(compared > 120);
}

TEST_CASE("mirror symmetry between the even branches") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> uI(-3.0, 3.0), ut(0.0, 2 * kPi);
    for (double mu : {0.3, 0.5, 2.0}) {
        const auto p = mu_params(mu);
        for (int i = 0; i < 40; ++i) {
            const double I = uI(rng), theta = ut(rng);
            if (classify(I, p) != CrestKind::Horizontal) continue;
            try {
                const double t0 = solve_tau_star(I, theta, TauCriterion::branch(0), p).tau_star;
                const double t2 = solve_tau_star(I, 2 * kPi - theta, TauCriterion::branch(2), p).tau_star;
                CHECK(t0 == doctest::Approx(-t2).epsilon(1e-9));
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::UnreachableBranch);
            }
        }
    }
}

TEST_CASE("both forms of the angular derivative agree") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uI(-3.0, 3.0), ut(0.0, 2 * kPi);
    const auto p = mu_params(0.5);
    for (int i = 0; i < 100; ++i) {
        const double I = uI(rng), theta = ut(rng);
        if (std::abs(I) < 0.05 || std::abs(I - 1.0) < 0.05) continue;
        try {
            const auto g = grad_reduced_poincare(I, theta, TauCriterion::minimal_abs(), p);
            const double scale = std::max({1.0, std::abs(g.dTheta_a1_form), std::abs(g.dTheta_a2_form)});
            CHECK(std::abs(g.dTheta_a1_form - g.dTheta_a2_form) / scale < 1e-9);
        } catch (const Error&) {
        }
    }
}

TEST_CASE("gradient matches finite differences of the reduced potential") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> uI(-3.0, 3.0), ut(0.0, 2 * kPi);
    const auto p = mu_params(0.5);
    const auto c = TauCriterion::branch(1);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 60; ++i) {
        const double I = uI(rng), theta = ut(rng);
        if (classify(I, p) != CrestKind::Horizontal || std::abs(I) < 0.05) continue;
        try {
            const auto g = grad_reduced_poincare(I, theta, c, p);
            if (g.tau.transversality < 1e-3) continue;
            const double h = 1e-6;
            const double fI = (reduced_poincare(I + h, theta, c, p) - reduced_poincare(I - h, theta, c, p)) / (2 * h);
            const double ft = (reduced_poincare(I, theta + h, c, p) - reduced_poincare(I, theta - h, c, p)) / (2 * h);
            CHECK(g.dI == doctest::Approx(fI).epsilon(1e-5).scale(1.0));
            CHECK(g.dTheta == doctest::Approx(ft).epsilon(1e-5).scale(1.0));
            ++checked;
        } catch (const Error&) {
        }
    }
    CHECK(checked >= 40);
}

TEST_CASE("zero perturbation gives the identity map") {
    const auto p = mu_params(0.5, 0.0);
    const ScatteringState x{0.3, 2.0};
    const auto y = scattering_step(x, TauCriterion::branch(1), p);
    CHECK(y.I == x.I);
    CHECK(y.theta == doctest::Approx(x.theta).epsilon(1e-15));
}

TEST_CASE("unreduced map depends on phi and s only through phi - I s") {
    const auto p = mu_params(0.5, 0.01);
    const auto c = TauCriterion::branch(1);
    for (double s : {0.0, 0.4, -1.7, 5.0}) {
        const double I = 0.3, theta = 3.4;
        const auto red = scattering_step({I, theta}, c, p);
        const auto un = scattering_step_unreduced({I, theta + I * s, s}, c, p);
        CHECK(un.s == s);
        CHECK(un.I == doctest::Approx(red.I).epsilon(1e-13));
        CHECK(wrap_angle(un.phi - un.I * s) == doctest::Approx(wrap_angle(red.theta)).epsilon(1e-12));
    }
}

TEST_CASE("scattering step is the first-order gradient step") {
    const auto p = mu_params(0.5, 1e-3);
    const auto c = TauCriterion::branch(1);
    const double I = -0.5, theta = 3.6;
    const auto g = grad_reduced_poincare(I, theta, c, p);
    const auto y = scattering_step({I, theta}, c, p);
    CHECK(y.I == doctest::Approx(I + 1e-3 * g.dTheta).epsilon(1e-14));
    CHECK(wrap_angle(y.theta) == doctest::Approx(wrap_angle(theta - 1e-3 * g.dI)).epsilon(1e-13));
}

TEST_CASE("extended map domain") {
    const auto p = mu_params(0.5);
    CHECK(extended_map_domain(0.3, 1.0, p));
    CHECK(extended_map_domain(0.8, 0.0, p));
    CHECK(extended_map_domain(0.8, kPi, p));
    CHECK_FALSE(extended_map_domain(0.8, kPi / 2, p));
    CHECK_FALSE(extended_map_domain(1.0, 1.0, p));
}

TEST_CASE("atlas regions and discontinuity lines") {
    CHECK(atlas_region(0.2) == AtlasRegion::I);
    CHECK(atlas_region(kPi) == AtlasRegion::II);
    CHECK(atlas_region(5.5) == AtlasRegion::III);
    CHECK(atlas_branch(AtlasRegion::I) == 0);
    CHECK(atlas_branch(AtlasRegion::II) == 1);
    CHECK(atlas_branch(AtlasRegion::III) == 2);
    CHECK_THROWS_AS(atlas_region(kPi / 2), Error);
    CHECK_THROWS_AS(atlas_region(1.5 * kPi + 1e-12), Error);
    CHECK(atlas_region(kPi / 2 + 1e-6) == AtlasRegion::II);
}

TEST_CASE("minimal |tau| atlas agrees with the extended maps") {
    const auto p = mu_params(0.6, 0.01);
    int total = 0, agree = 0;
    for (int i = 0; i < 40; ++i) {
        const double I = -2.0 + 4.0 * (i + 0.5) / 40.0;
        if (classify(I, p) == CrestKind::Singular) continue;
        for (int j = 0; j < 40; ++j) {
            const double theta = 2 * kPi * (j + 0.5) / 40.0;
            if (!extended_map_domain(I, theta, p)) continue;
            try {
                const auto step = piecewise_global_map({I, theta}, p);
                ++total;
                agree += step.matches_extended ? 1 : 0;
            } catch (const Error&) {
            }
        }
    }
    CHECK(total > 500);
    CHECK(agree == total);
}

TEST_CASE("window end theta_plus") {
    CHECK(theta_plus(0.5, mu_params(0.15)) == doctest::Approx(1.5 * kPi));
    CHECK(theta_plus(1.25, mu_params(0.15)) == doctest::Approx(1.25 * kPi));
    CHECK(theta_plus(-0.25, mu_params(6.0)) == doctest::Approx(1.25 * kPi));
    CHECK(theta_plus(1.0, mu_params(0.5)) == doctest::Approx(2 * kPi));
    CHECK(theta_plus(-3.0, mu_params(0.5)) == doctest::Approx(1.5 * kPi));
}

TEST_CASE("odd-branch jumps increase the action inside the window") {
    for (double mu : {0.15, 0.5}) {
        const auto p = mu_params(mu, 1e-3);
        for (double I : {-0.6, -0.2, 0.3, 0.5}) {
            if (classify(I, p) == CrestKind::Singular) continue;
            const double hi = theta_plus(I, p);
            for (int j = 1; j < 10; ++j) {
                const double theta = kPi + (hi - kPi) * j / 10.0;
                try {
                    const auto y = scattering_step({I, theta}, TauCriterion::branch(1), p);
                    CAPTURE(mu);
                    CAPTURE(I);
                    CAPTURE(theta);
                    CHECK(y.I > I);
                } catch (const Error& e) {
                    CHECK(e.code() == ErrorCode::UnreachableBranch);
                }
            }
        }
    }
}
