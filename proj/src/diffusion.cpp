#include "pendrot/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "pendrot/error.hpp"

namespace pendrot {

namespace {

struct Window {
    double lo;
    double hi;
    bool contains(double theta) const { return lo < theta && theta < hi; }
    bool empty() const { return !(lo < hi); }
};

Window window_at(double I, const PseudoOrbit& o) {
    const double margin = o.policy.margin_coeff * o.params.eps * o.params.eps;
    const double tp = theta_plus(I, o.params);
    if (o.left_window) return {kTwoPi - tp + margin, kTwoPi - o.rho - margin};
    return {o.rho + margin, tp - margin};
}

ScatteringState reduced_of(const InnerState& x) { return {x.I, wrap_angle(x.phi)}; }

constexpr TauCriterion kJumpCriterion{CriterionKind::Branch, 1};

}  // namespace

double poisson_bracket(double I, double theta, const TauCriterion& criterion, const ReducedParams& p,
                       const TauSearchConfig& cfg) {
    const TauSolution sol = solve_tau_star(I, theta, criterion, p, cfg);
    if (sol.degenerate) throw Error(ErrorCode::TangencyDegenerate, "bracket needs a non-degenerate tau*");
    const PoincareGradient g = grad_at(sol, p);
    const double r = p.r();
    double dF_dtheta = 0.0, dF_dI = I;
    switch (region_of(I, p)) {
        case TorusRegion::Res0:
            dF_dtheta = -p.eps * p.a1 * std::sin(theta);
            break;
        case TorusRegion::Res1:
            dF_dtheta = -p.eps * p.a2 * r * std::sin(r * theta);
            dF_dI = I - p.resonance_action();
            break;
        case TorusRegion::NonResonant:
            break;
    }
    return dF_dtheta * g.dI - dF_dI * g.dTheta;
}

TransversalityReport transversality(double I, double theta, const TauCriterion& criterion,
                                    const ReducedParams& p, double tol_bracket) {
    TransversalityReport rep;
    rep.I = I;
    rep.theta = theta;
    rep.region = region_of(I, p);
    rep.bracket = poisson_bracket(I, theta, criterion, p);
    rep.transversal = std::abs(rep.bracket) >= tol_bracket;
    return rep;
}

std::size_t PseudoOrbit::scatter_count() const {
    return static_cast<std::size_t>(
        std::count_if(legs.begin(), legs.end(), [](const Leg& l) { return std::holds_alternative<ScatterLeg>(l); }));
}

std::size_t PseudoOrbit::inner_count() const { return legs.size() - scatter_count(); }

double PseudoOrbit::final_action() const {
    if (legs.empty()) return I_start;
    const Leg& last = legs.back();
    if (const auto* s = std::get_if<ScatterLeg>(&last)) return s->to.I;
    return std::get<InnerLeg>(last).to.I;
}

InnerState to_input_frame(const PseudoOrbit& orbit, const InnerState& x) {
    InnerState y = x;
    if (orbit.s_shifted) y.s -= kPi;
    return y;
}

PseudoOrbit build_pseudo_orbit(double I_start, double I_end, const ReducedParams& params,
                               const DiffusionPolicy& policy) {
    params.validate();
    if (!params.unit_ratio()) throw Error(ErrorCode::InvalidParams, "diffusion runs require r = 1");
    if (params.a1 == 0.0 || params.a2 == 0.0) {
        throw Error(ErrorCode::InvalidParams, "a1*a2 = 0: no diffusion mechanism");
    }
    if (!(params.eps > 0.0)) throw Error(ErrorCode::InvalidParams, "eps = 0: no diffusion mechanism");
    if (params.eps > policy.eps_cap) {
        throw Error(ErrorCode::InvalidParams, "eps above the configured cap " + std::to_string(policy.eps_cap));
    }
    if (!(I_start < I_end)) throw Error(ErrorCode::InvalidParams, "need I_start < I_end");

    PseudoOrbit o;
    o.input_params = params;
    o.params = params;
    if (params.mu() < 0) {
        o.params.a2 = -params.a2;
        o.s_shifted = true;
    }
    o.left_window = o.params.a1 < 0;
    o.policy = policy;
    o.rho = kPi + policy.delta;
    o.I_start = I_start;
    o.I_end = I_end;

    const ReducedParams& p = o.params;
    const double eps2 = p.eps * p.eps;
    const double level_bound = policy.level_coeff * eps2;
    const double t_max = policy.t_max_coeff / p.eps;

    ScatteringState cur{I_start, 0.0};
    {
        const Window w = window_at(I_start, o);
        if (w.empty()) throw Error(ErrorCode::WindowEmpty, "empty jump window at I_start");
        cur.theta = policy.theta_start >= 0 ? wrap_angle(policy.theta_start) : 0.5 * (w.lo + w.hi);
    }

    int run = 0;
    bool last_was_scatter = false;
    while (cur.I < I_end) {
        const Window w = window_at(cur.I, o);
        if (w.empty()) {
            throw Error(ErrorCode::WindowEmpty, "theta_plus <= rho at I = " + std::to_string(cur.I));
        }
        if (w.contains(cur.theta)) {
            try {
                const TauSolution sol = solve_tau_star(cur.I, cur.theta, kJumpCriterion, p);
                if (!sol.degenerate) {
                    const PoincareGradient g = grad_at(sol, p);
                    const ScatteringState next{cur.I + p.eps * g.dTheta, wrap_angle(cur.theta - p.eps * g.dI)};
                    const double L0 = reduced_poincare_at(sol, p);
                    const double L1 = reduced_poincare(next.I, next.theta, kJumpCriterion, p);
                    if (g.dTheta > 0 && std::abs(L1 - L0) <= level_bound) {
                        if (!last_was_scatter) ++run;
                        ScatterLeg leg;
                        leg.from = cur;
                        leg.to = next;
                        leg.level_from = L0;
                        leg.level_to = L1;
                        leg.residual = std::abs(L1 - L0);
                        leg.tau_star = sol.tau_star;
                        leg.bracket = poisson_bracket(cur.I, cur.theta, kJumpCriterion, p);
                        leg.run = run;
                        o.legs.emplace_back(leg);
                        cur = next;
                        last_was_scatter = true;
                        continue;
                    }
                }
            } catch (const Error& e) {
                if (e.code() != ErrorCode::UnreachableBranch && e.code() != ErrorCode::TangencyDegenerate &&
                    e.code() != ErrorCode::SingularCrest) {
                    throw;
                }
            }
        }
        if (o.inner_time >= t_max) {
            throw Error(ErrorCode::StuckAtResonance,
                        "no admissible return within t_max at I = " + std::to_string(cur.I));
        }
        InnerLeg leg;
        leg.from = {cur.I, cur.theta, 0.0};
        leg.duration = kTwoPi;
        leg.samples = inner_trajectory(leg.from, leg.duration, policy.samples_per_leg, p, policy.ode);
        leg.to = leg.samples.back().x;
        leg.region = region_of(leg.from.I, p);
        leg.torus_from = torus_value_averaged(leg.from, leg.region, p);
        leg.torus_to = torus_value_averaged(leg.to, leg.region, p);
        o.inner_time += leg.duration;
        o.legs.emplace_back(leg);
        cur = reduced_of(leg.to);
        last_was_scatter = false;
    }
    return o;
}

VerificationReport verify_pseudo_orbit(const PseudoOrbit& o) {
    VerificationReport rep;
    const ReducedParams& p = o.params;
    const double eps2 = p.eps * p.eps;
    rep.level_bound = o.policy.level_coeff * eps2;
    rep.resonant_drift_bound = o.policy.torus_drift_coeff * eps2;
    rep.min_abs_bracket = std::numeric_limits<double>::infinity();

    InnerConfig check_ode = o.policy.ode;
    check_ode.method = InnerIntegrator::Fehlberg78;

    auto fail = [&](const std::string& msg) {
        if (rep.failures.size() < 50) rep.failures.push_back(msg);
    };

    std::optional<ScatteringState> prev_end;
    int prev_run = -1;
    double prev_run_I = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < o.legs.size(); ++i) {
        const Leg& leg = o.legs[i];
        ScatteringState start, end;
        if (const auto* s = std::get_if<ScatterLeg>(&leg)) {
            ++rep.scatter_legs;
            start = s->from;
            end = s->to;
            try {
                const TauSolution sol = solve_tau_star(s->from.I, s->from.theta, kJumpCriterion, p);
                const PoincareGradient g = grad_at(sol, p);
                const double L0 = reduced_poincare_at(sol, p);
                const double L1 = reduced_poincare(s->to.I, s->to.theta, kJumpCriterion, p);
                const double res = std::abs(L1 - L0);
                rep.max_level_residual = std::max(rep.max_level_residual, res);
                if (res > rep.level_bound) fail("leg " + std::to_string(i) + ": level residual " + std::to_string(res));
                const ScatteringState again{s->from.I + p.eps * g.dTheta,
                                            wrap_angle(s->from.theta - p.eps * g.dI)};
                double dth = std::abs(again.theta - s->to.theta);
                dth = std::min(dth, kTwoPi - dth);
                const double mismatch = std::max(std::abs(again.I - s->to.I), dth);
                rep.max_step_mismatch = std::max(rep.max_step_mismatch, mismatch);
                if (mismatch > rep.step_mismatch_bound) {
                    fail("leg " + std::to_string(i) + ": stored jump differs from the map by " + std::to_string(mismatch));
                }
                if (sol.degenerate) fail("leg " + std::to_string(i) + ": degenerate tau*");
                if (!(g.dTheta > 0) || !(s->to.I > s->from.I)) {
                    rep.action_increases = false;
                    fail("leg " + std::to_string(i) + ": action does not increase");
                }
                const double br = poisson_bracket(s->from.I, s->from.theta, kJumpCriterion, p);
                rep.min_abs_bracket = std::min(rep.min_abs_bracket, std::abs(br));
                if (std::abs(br) < kTolBracket) ++rep.tangent_jumps;
            } catch (const Error& e) {
                fail("leg " + std::to_string(i) + ": " + e.what());
            }
            if (!window_at(s->from.I, o).contains(s->from.theta)) {
                rep.inside_window = false;
                fail("leg " + std::to_string(i) + ": jump outside the window");
            }
            if (s->run == prev_run && !(s->from.I > prev_run_I)) {
                rep.monotone_runs = false;
                fail("leg " + std::to_string(i) + ": action not increasing within run");
            }
            prev_run = s->run;
            prev_run_I = s->from.I;
        } else {
            const auto& in = std::get<InnerLeg>(leg);
            ++rep.inner_legs;
            start = reduced_of(in.from);
            end = reduced_of(in.to);
            try {
                const InnerState again = inner_flow(in.from, in.duration, p, check_ode);
                const double d = std::max({std::abs(again.I - in.to.I), std::abs(again.phi - in.to.phi),
                                           std::abs(again.s - in.to.s)});
                rep.max_reintegration = std::max(rep.max_reintegration, d);
                if (d > rep.reintegration_bound) {
                    fail("leg " + std::to_string(i) + ": re-integration differs by " + std::to_string(d));
                }
            } catch (const Error& e) {
                fail("leg " + std::to_string(i) + ": " + e.what());
            }
            if (in.region != TorusRegion::NonResonant) {
                const double drift = std::abs(torus_value_averaged(in.to, in.region, p) -
                                              torus_value_averaged(in.from, in.region, p));
                rep.max_resonant_drift = std::max(rep.max_resonant_drift, drift);
                if (drift > rep.resonant_drift_bound) {
                    fail("leg " + std::to_string(i) + ": torus drift " + std::to_string(drift));
                }
            }
            prev_run = -1;
        }
        if (prev_end) {
            double dth = std::abs(prev_end->theta - start.theta);
            dth = std::min(dth, kTwoPi - dth);
            const double gap = std::max(std::abs(prev_end->I - start.I), dth);
            rep.max_endpoint_gap = std::max(rep.max_endpoint_gap, gap);
            if (gap != 0.0) fail("leg " + std::to_string(i) + ": does not start where the previous leg ended");
        }
        prev_end = end;
    }
    if (rep.scatter_legs == 0) rep.min_abs_bracket = 0.0;
    rep.reached_end = o.final_action() >= o.I_end;
    if (!rep.reached_end) fail("orbit stops before I_end");
    rep.ok = rep.failures.empty();
    return rep;
}

}  // namespace pendrot
