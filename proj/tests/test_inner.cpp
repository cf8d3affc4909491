#include <doctest.h>

#include <cmath>
#include <vector>

#include "pendrot/error.hpp"
#include "pendrot/inner.hpp"

using namespace pendrot;

namespace {
ReducedParams params(double mu, double eps) { return ReducedParams::canonical(mu, 1.0, eps); }

double max_torus_drift(const InnerState& x0, double t, const ReducedParams& p) {
    const auto region = region_of(x0.I, p);
    const double F0 = torus_value_averaged(x0, region, p);
    double drift = 0.0;
    for (const auto& s : inner_trajectory(x0, t, 400, p))
        drift = std::max(drift, std::abs(torus_value_averaged(s.x, region, p) - F0));
    return drift;
}
}  // namespace

TEST_CASE("unperturbed flow is the exact rotation") {
    const auto p = params(0.5, 0.0);
    const InnerState x{0.7, 1.0, 0.2};
    const auto y = inner_flow(x, 3.5, p);
    CHECK(y.I == 0.7);
    CHECK(y.phi == doctest::Approx(1.0 + 0.7 * 3.5));
    CHECK(y.s == doctest::Approx(3.7));
}

TEST_CASE("energy balance holds along trajectories") {
    const auto p = params(0.5, 0.01);
    for (const InnerState& x : {InnerState{0.5, 0.3, 0.0}, InnerState{0.0, 1.0, 2.0}, InnerState{1.02, 2.0, 0.5}}) {
        const auto eb = inner_energy_balance(x, 1000.0, 2000, p);
        CHECK(eb.max_residual < 1e-8);
        CHECK(eb.max_rate_ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("both integrators agree and the flow is reversible") {
    const auto p = params(0.5, 0.02);
    const InnerState x{0.4, 0.3, 1.1};
    const auto a = inner_flow(x, 200.0, p);
    const auto b = inner_flow(x, 200.0, p, {1e-12, InnerIntegrator::Fehlberg78});
    CHECK(std::abs(a.I - b.I) < 1e-8);
    CHECK(std::abs(a.phi - b.phi) < 1e-7);
    const auto back = inner_flow(a, -200.0, p);
    CHECK(std::abs(back.I - x.I) < 1e-8);
    CHECK(std::abs(back.phi - x.phi) < 1e-7);
    CHECK(std::abs(back.s - x.s) < 1e-9);
}

TEST_CASE("trajectory samples are evenly spaced and end at t") {
    const auto p = params(0.5, 0.01);
    const auto tr = inner_trajectory({0.5, 0.0, 0.0}, 10.0, 5, p);
    REQUIRE(tr.size() == 6);
    CHECK(tr.front().t == 0.0);
    CHECK(tr.back().t == 10.0);
    CHECK(tr[2].t == doctest::Approx(4.0));
}

TEST_CASE("regions and resonance centres") {
    const auto p = params(0.5, 0.01);
    CHECK(region_of(0.1, p) == TorusRegion::Res0);
    CHECK(region_of(0.9, p) == TorusRegion::Res1);
    CHECK(region_of(0.5, p) == TorusRegion::NonResonant);
    CHECK(std::string(to_string(TorusRegion::Res1)) == "res1");
    ReducedParams half = p;
    half.r_num = 1;
    half.r_den = 2;
    CHECK(half.resonance_action() == doctest::Approx(2.0));
    CHECK(region_of(2.1, half) == TorusRegion::Res1);
    CHECK(region_of(1.0, half) == TorusRegion::NonResonant);
    CHECK(resonance_half_width(TorusRegion::Res0, p) == doctest::Approx(2.0 * std::sqrt(0.005)));
}

TEST_CASE("torus functions at reference points") {
    const auto p = params(0.5, 0.01);
    CHECK(torus_value({0.0, kPi / 2, 0.0}, TorusRegion::Res0, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-17));
    CHECK(torus_value({0.0, 0.0, 0.0}, TorusRegion::Res0, p) == doctest::Approx(0.005));
    CHECK(torus_value({1.0, 0.0, 0.0}, TorusRegion::Res1, p) == doctest::Approx(0.01));
    CHECK(torus_value({0.5, 0.3, 0.0}, TorusRegion::NonResonant, p) == doctest::Approx(0.125));
}

TEST_CASE("torus functions are adiabatic invariants of second order") {
    const InnerState x0{0.55, 0.4, 0.0};
    std::vector<double> le, ld;
    for (double eps : {0.02, 0.01, 0.005, 0.0025}) {
        const auto p = params(0.5, eps);
        le.push_back(std::log(eps));
        ld.push_back(std::log(max_torus_drift(x0, 1.0 / eps, p)));
    }
    // least-squares slope of log drift against log ε
    const double n = le.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < le.size(); ++i) {
        sx += le[i];
        sy += ld[i];
        sxx += le[i] * le[i];
        sxy += le[i] * ld[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CAPTURE(slope);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("resonant torus function stays within second order near the centre") {
    for (double eps : {0.01, 0.005}) {
        const auto p = params(0.5, eps);
        const InnerState x0{0.05, 0.5, 0.0};
        CHECK(max_torus_drift(x0, 1.0 / eps, p) < 10.0 * eps * eps);
    }
}
