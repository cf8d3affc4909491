#include <doctest.h>

#include <cmath>
#include <variant>

#include "pendrot/diffusion.hpp"
#include "pendrot/error.hpp"

using namespace pendrot;

namespace {
ReducedParams amps(double a1, double a2, double eps) {
    ReducedParams p = ReducedParams::canonical(1.0, 1.0, eps);
    p.a1 = a1;
    p.a2 = a2;
    return p;
}

const PseudoOrbit& reference_orbit() {
    static const PseudoOrbit o = build_pseudo_orbit(-1.0, 1.0, amps(0.75, 1.0, 0.01));
    return o;
}

ErrorCode code_of(double a, double b, const ReducedParams& p, const DiffusionPolicy& pol = {}) {
    try {
        build_pseudo_orbit(a, b, p, pol);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidParams;
}
}  // namespace

TEST_CASE("bracket in the non-resonant region is -I times the angular derivative") {
    const auto p = amps(0.5, 1.0, 0.01);
    const auto c = TauCriterion::branch(1);
    for (double I : {-0.6, 0.5, 1.6}) {
        const double theta = 3.5;
        const auto g = grad_reduced_poincare(I, theta, c, p);
        CHECK(poisson_bracket(I, theta, c, p) == doctest::Approx(-I * g.dTheta).epsilon(1e-14));
    }
}

TEST_CASE("bracket in the resonant regions uses the pendulum torus function") {
    const auto p = amps(0.5, 1.0, 0.01);
    const auto c = TauCriterion::branch(1);
    {
        const double I = 0.1, theta = 3.5;
        const auto g = grad_reduced_poincare(I, theta, c, p);
        const double want = -0.01 * 0.5 * std::sin(theta) * g.dI - I * g.dTheta;
        CHECK(poisson_bracket(I, theta, c, p) == doctest::Approx(want).epsilon(1e-13));
    }
    {
        const double I = 0.9, theta = 3.5;
        const auto g = grad_reduced_poincare(I, theta, c, p);
        const double want = -0.01 * std::sin(theta) * g.dI - (I - 1.0) * g.dTheta;
        CHECK(poisson_bracket(I, theta, c, p) == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("transversality report") {
    const auto p = amps(0.5, 1.0, 0.01);
    const auto rep = transversality(0.5, 3.5, TauCriterion::branch(1), p);
    CHECK(rep.region == TorusRegion::NonResonant);
    CHECK(rep.transversal == (std::abs(rep.bracket) >= kTolBracket));
    CHECK(rep.transversal);
    // at θ = π the odd branch has τ* = 0 and ∂θℒ* = 0
    const auto flat = transversality(0.5, kPi, TauCriterion::branch(1), p);
    CHECK(std::abs(flat.bracket) < 1e-10);
    CHECK_FALSE(flat.transversal);
}

TEST_CASE("pseudo-orbit crosses both resonances and verifies") {
    const PseudoOrbit& o = reference_orbit();
    CHECK(o.final_action() >= 1.0);
    CHECK(o.scatter_count() > 0);
    CHECK(o.inner_count() > 0);
    CHECK(o.scatter_count() + o.inner_count() == o.legs.size());
    CHECK(o.inner_time <= 1e3 / 0.01);
    CHECK_FALSE(o.s_shifted);
    CHECK_FALSE(o.left_window);
    const auto rep = verify_pseudo_orbit(o);
    for (const auto& f : rep.failures) MESSAGE(f);
    CHECK(rep.ok);
    CHECK(rep.reached_end);
    CHECK(rep.max_level_residual <= rep.level_bound);
    CHECK(rep.max_reintegration < 1e-8);
    CHECK(rep.max_endpoint_gap == 0.0);
    CHECK(rep.tangent_jumps == 0);
    CHECK(rep.min_abs_bracket >= kTolBracket);
}

TEST_CASE("every scatter leg raises the action") {
    for (const auto& leg : reference_orbit().legs) {
        if (const auto* s = std::get_if<ScatterLeg>(&leg)) {
            CHECK(s->to.I > s->from.I);
            CHECK(s->from.theta > kPi);
        }
    }
}

TEST_CASE("verifier flags tampered legs") {
    SUBCASE("jump endpoint") {
        PseudoOrbit o = reference_orbit();
        for (auto& leg : o.legs) {
            if (auto* s = std::get_if<ScatterLeg>(&leg)) {
                s->to.I += 1e-7;
                break;
            }
        }
        const auto rep = verify_pseudo_orbit(o);
        CHECK_FALSE(rep.ok);
        CHECK(rep.max_step_mismatch > 1e-8);
        CHECK(rep.max_endpoint_gap > 0.0);
    }
    SUBCASE("inner arc endpoint") {
        PseudoOrbit o = reference_orbit();
        for (auto& leg : o.legs) {
            if (auto* in = std::get_if<InnerLeg>(&leg)) {
                in->to.phi += 1e-6;
                break;
            }
        }
        const auto rep = verify_pseudo_orbit(o);
        CHECK_FALSE(rep.ok);
        CHECK(rep.max_reintegration > 1e-7);
    }
    SUBCASE("truncated orbit") {
        PseudoOrbit o = reference_orbit();
        o.legs.resize(o.legs.size() / 2);
        const auto rep = verify_pseudo_orbit(o);
        CHECK_FALSE(rep.reached_end);
        CHECK_FALSE(rep.ok);
    }
}

TEST_CASE("sign variants of the amplitudes") {
    SUBCASE("both negative: left window") {
        const auto o = build_pseudo_orbit(-1.0, 1.0, amps(-0.75, -1.0, 0.01));
        CHECK(o.left_window);
        CHECK_FALSE(o.s_shifted);
        CHECK(verify_pseudo_orbit(o).ok);
    }
    SUBCASE("mu < 0: shifted frame") {
        const auto o = build_pseudo_orbit(-1.0, 1.0, amps(0.75, -1.0, 0.01));
        CHECK(o.s_shifted);
        CHECK(o.params.mu() > 0);
        CHECK(verify_pseudo_orbit(o).ok);
        const InnerState x{0.3, 1.0, 0.5};
        const InnerState y = to_input_frame(o, x);
        CHECK(y.I == x.I);
        CHECK(y.phi == x.phi);
        // the input potential at y equals the normalized potential at x
        CHECK(inner_energy(y, o.input_params) == doctest::Approx(inner_energy(x, o.params)).epsilon(1e-14));
    }
}

TEST_CASE("invalid diffusion requests") {
    CHECK(code_of(-0.5, 1.0, amps(0.75, 1.0, 0.0)) == ErrorCode::InvalidParams);
    CHECK(code_of(-0.5, 1.0, amps(0.0, 1.0, 0.01)) == ErrorCode::InvalidParams);
    CHECK(code_of(-0.5, 1.0, amps(0.75, 0.0, 0.01)) == ErrorCode::InvalidParams);
    CHECK(code_of(-0.5, 1.0, amps(0.75, 1.0, 0.2)) == ErrorCode::InvalidParams);
    CHECK(code_of(1.0, -0.5, amps(0.75, 1.0, 0.01)) == ErrorCode::InvalidParams);
    ReducedParams half = amps(0.75, 1.0, 0.01);
    half.r_num = 1;
    half.r_den = 2;
    CHECK(code_of(-0.5, 1.0, half) == ErrorCode::InvalidParams);
}

TEST_CASE("a tight level budget makes the search give up") {
    DiffusionPolicy pol;
    pol.level_coeff = 1e-6;
    pol.t_max_coeff = 1.0;
    CHECK(code_of(-0.5, 1.05, amps(0.75, 1.0, 0.01), pol) == ErrorCode::StuckAtResonance);
}
