#include "pendrot/inner.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <string>

#include "pendrot/error.hpp"

namespace pendrot {

namespace odeint = boost::numeric::odeint;

namespace {

// (I, φ, s, ∫∂K/∂s dt)
using State = std::array<double, 4>;

struct Rhs {
    double eps, a1, a2, r;
    void operator()(const State& x, State& dx, double /*t*/) const {
        const double res2 = r * x[1] - x[2];
        dx[0] = eps * (a1 * std::sin(x[1]) + r * a2 * std::sin(res2));
        dx[1] = x[0];
        dx[2] = 1.0;
        dx[3] = eps * a2 * std::sin(res2);
    }
};

State pack(const InnerState& x) { return {x.I, x.phi, x.s, 0.0}; }
InnerState unpack(const State& x) { return {x[0], x[1], x[2]}; }

// Integrates from 0 to t and calls obs(t_i, state) at the requested times.
template <class Obs>
void integrate(State& x, const std::vector<double>& times, const ReducedParams& p,
               const InnerConfig& cfg, Obs&& obs) {
    const Rhs rhs{p.eps, p.a1, p.a2, p.r()};
    const double t_end = times.back();
    if (t_end == 0.0) {
        for (double t : times) obs(t, x);
        return;
    }
    const double dt0 = (t_end > 0 ? 1.0 : -1.0) * 1e-3;
    try {
        if (cfg.method == InnerIntegrator::Dopri5) {
            auto stepper = odeint::make_dense_output(cfg.tol, cfg.tol, odeint::runge_kutta_dopri5<State>());
            odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0,
                                    [&](const State& s, double t) { obs(t, s); });
        } else {
            auto stepper = odeint::make_controlled(cfg.tol, cfg.tol, odeint::runge_kutta_fehlberg78<State>());
            odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0,
                                    [&](const State& s, double t) { obs(t, s); });
        }
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StepFailure, e.what());
    }
}

std::vector<double> sample_times(double t, int n) {
    if (n < 1) n = 1;
    std::vector<double> times(n + 1);
    for (int i = 0; i <= n; ++i) times[i] = t * i / n;
    times[n] = t;
    return times;
}

}  // namespace

double inner_energy(const InnerState& x, const ReducedParams& p) {
    return 0.5 * x.I * x.I + p.eps * (p.a1 * std::cos(x.phi) + p.a2 * std::cos(p.r() * x.phi - x.s));
}

InnerState inner_flow(const InnerState& x0, double t, const ReducedParams& p, const InnerConfig& cfg) {
    if (p.eps == 0.0) return {x0.I, x0.phi + x0.I * t, x0.s + t};
    State x = pack(x0);
    State last = x;
    integrate(x, {0.0, t}, p, cfg, [&](double, const State& s) { last = s; });
    return unpack(last);
}

std::vector<InnerSample> inner_trajectory(const InnerState& x0, double t, int n, const ReducedParams& p,
                                          const InnerConfig& cfg) {
    std::vector<InnerSample> out;
    const auto times = sample_times(t, n);
    out.reserve(times.size());
    if (p.eps == 0.0) {
        for (double ti : times) out.push_back({ti, {x0.I, x0.phi + x0.I * ti, x0.s + ti}});
        return out;
    }
    State x = pack(x0);
    integrate(x, times, p, cfg, [&](double ti, const State& s) { out.push_back({ti, unpack(s)}); });
    return out;
}

EnergyBalance inner_energy_balance(const InnerState& x0, double t, int n, const ReducedParams& p,
                                   const InnerConfig& cfg) {
    EnergyBalance eb;
    const double K0 = inner_energy(x0, p);
    const double rate_bound = p.eps * (std::abs(p.a1) + p.r() * std::abs(p.a2));
    State x = pack(x0);
    integrate(x, sample_times(t, n), p, cfg, [&](double, const State& s) {
        const InnerState xs = unpack(s);
        eb.max_residual = std::max(eb.max_residual, std::abs(inner_energy(xs, p) - s[3] - K0));
        if (rate_bound > 0) {
            const double rate = p.eps * (p.a1 * std::sin(xs.phi) + p.r() * p.a2 * std::sin(p.r() * xs.phi - xs.s));
            eb.max_rate_ratio = std::max(eb.max_rate_ratio, std::abs(rate) / rate_bound);
        }
        eb.end = xs;
    });
    return eb;
}

const char* to_string(TorusRegion region) noexcept {
    switch (region) {
        case TorusRegion::Res0: return "res0";
        case TorusRegion::Res1: return "res1";
        case TorusRegion::NonResonant: return "nonresonant";
    }
    return "unknown";
}

TorusRegion region_of(double I, const ReducedParams& p) {
    if (std::abs(I) <= kRegionHalfWidth) return TorusRegion::Res0;
    if (std::abs(I - p.resonance_action()) <= kRegionHalfWidth) return TorusRegion::Res1;
    return TorusRegion::NonResonant;
}

namespace {

double torus_formula(double J, const InnerState& x, TorusRegion region, const ReducedParams& p) {
    switch (region) {
        case TorusRegion::Res0: return 0.5 * J * J + p.eps * p.a1 * std::cos(x.phi);
        case TorusRegion::Res1: {
            const double y = J - p.resonance_action();
            return 0.5 * y * y + p.eps * p.a2 * std::cos(p.r() * x.phi - x.s);
        }
        case TorusRegion::NonResonant: return 0.5 * J * J;
    }
    return 0.0;
}

}  // namespace

double torus_value(const InnerState& x, TorusRegion region, const ReducedParams& p) {
    return torus_formula(x.I, x, region, p);
}

double torus_value(const InnerState& x, const ReducedParams& p) {
    return torus_value(x, region_of(x.I, p), p);
}

double averaged_action(const InnerState& x, TorusRegion region, const ReducedParams& p) {
    const double r = p.r();
    double J = x.I;
    if (region != TorusRegion::Res0) J += p.eps * p.a1 * std::cos(x.phi) / x.I;
    if (region != TorusRegion::Res1) J += p.eps * r * p.a2 * std::cos(r * x.phi - x.s) / (r * x.I - 1.0);
    return J;
}

double torus_value_averaged(const InnerState& x, TorusRegion region, const ReducedParams& p) {
    return torus_formula(averaged_action(x, region, p), x, region, p);
}

double torus_value_averaged(const InnerState& x, const ReducedParams& p) {
    return torus_value_averaged(x, region_of(x.I, p), p);
}

double resonance_half_width(TorusRegion region, const ReducedParams& p) {
    switch (region) {
        case TorusRegion::Res0: return 2.0 * std::sqrt(p.eps * std::abs(p.a1));
        case TorusRegion::Res1: return 2.0 * std::sqrt(p.eps * std::abs(p.a2));
        case TorusRegion::NonResonant: return 0.0;
    }
    return 0.0;
}

}  // namespace pendrot
