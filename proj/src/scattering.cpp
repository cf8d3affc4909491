#include "pendrot/scattering.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <charconv>
#include <functional>
#include <cmath>
#include <limits>
#include <optional>

#include "pendrot/error.hpp"

namespace pendrot {

namespace {

// 2 sech²σ < 1e−16 beyond this.
constexpr double kSechCutoff = 19.1;

struct RayModel {
    double I, theta, r, d, w1n, w2n;  // normalized weights
    double lipschitz, curvature;

    RayModel(double I_, double theta_, const ReducedParams& p) : I(I_), theta(theta_), r(p.r()) {
        d = r * I - 1.0;
        const CrestWeights w = crest_weights(I, p);
        const double W = w.scale();
        w1n = w.w1 / W;
        w2n = w.w2 / W;
        lipschitz = std::abs(I * w1n) + std::abs(d * w2n);
        curvature = I * I * std::abs(w1n) + d * d * std::abs(w2n);
    }
    double phi(double t) const { return theta - I * t; }
    double sigma(double t) const { return r * theta - d * t; }
    double g(double t) const { return w1n * std::sin(phi(t)) + w2n * std::sin(sigma(t)); }
    double dg(double t) const { return -I * w1n * std::cos(phi(t)) - d * w2n * std::cos(sigma(t)); }
};

// Roots of g on [0, ±τ_max], produced in order of increasing |τ|.
class RootStream {
public:
    RootStream(const RayModel& m, int dir, double h, double tau_max, double tol)
        : m_(m), dir_(dir), h_(h), tau_max_(tau_max), tol_(tol) {
        g_frontier_ = m_.g(0.0);
    }

    bool exhausted() const { return frontier_ >= tau_max_; }
    double frontier() const { return frontier_; }

    // Scan one more step; appends roots found (|τ| ascending) to out.
    void advance(std::vector<double>& out) {
        if (exhausted()) return;
        const double a = frontier_;
        const double b = std::min(frontier_ + h_, tau_max_);
        const double gb = m_.g(dir_ * b);
        if (a == 0.0 && g_frontier_ == 0.0) out.push_back(0.0);
        scan(a, b, g_frontier_, gb, out, 0);
        frontier_ = b;
        g_frontier_ = gb;
    }

private:
    // a, b are |τ| values
    void scan(double a, double b, double ga, double gb, std::vector<double>& out, int depth) {
        if (gb == 0.0) {
            out.push_back(dir_ * b);
            return;
        }
        if (ga == 0.0) ga = m_.g(dir_ * (a + 1e-3 * (b - a)));
        if ((ga < 0) != (gb < 0)) {
            out.push_back(dir_ * bisect(a, b, ga));
            return;
        }
        const double w = b - a;
        const double aga = std::abs(ga), agb = std::abs(gb);
        if (aga + agb > m_.lipschitz * w) return;
        if (std::min(aga, agb) > m_.curvature * w * w / 8.0) return;
        if (w < 1e-10 || depth > 60) {
            // tangential touch: no sign change, residual at round-off level
            const double mid = 0.5 * (a + b);
            if (std::abs(m_.g(dir_ * mid)) < 1e-13) out.push_back(dir_ * mid);
            return;
        }
        const double mid = 0.5 * (a + b);
        const double gm = m_.g(dir_ * mid);
        scan(a, mid, ga, gm, out, depth + 1);
        scan(mid, b, gm, gb, out, depth + 1);
    }

    double bisect(double a, double b, double ga) const {
        while (b - a > tol_) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            const double gm = m_.g(dir_ * mid);
            if (gm == 0.0) return mid;
            if ((gm < 0) == (ga < 0)) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        return 0.5 * (a + b);
    }

    const RayModel& m_;
    int dir_;
    double h_, tau_max_, tol_;
    double frontier_ = 0.0;
    double g_frontier_ = 0.0;
};

TauSolution make_solution(const RayModel& m, double tau, const ReducedParams& p,
                          const TauSearchConfig& cfg) {
    TauSolution s;
    s.tau_star = tau;
    s.I = m.I;
    s.theta = m.theta;
    s.phi = m.phi(tau);
    s.sigma = m.sigma(tau);
    s.transversality = std::abs(m.dg(tau));
    s.degenerate = s.transversality < cfg.tol_degen;
    s.branch_hit.I = m.I;
    s.branch_hit.kind = classify(m.I, p);
    s.branch_hit.k = crest_branch_index(m.I, s.phi, s.sigma, p);
    return s;
}

bool admissible(const TauSolution& s, const TauCriterion& c) {
    switch (c.kind) {
        case CriterionKind::Down: return s.tau_star <= 0.0 && s.branch_hit.k % 2 == 0;
        case CriterionKind::Up: return s.tau_star >= 0.0 && s.branch_hit.k % 2 == 0;
        case CriterionKind::MinimalAbs: return true;
        case CriterionKind::Branch: return s.branch_hit.k == c.k;
        case CriterionKind::Extended: return horizontal_branch_index(s.sigma) == c.k;
    }
    return false;
}

double gk_integrate(const std::function<double(double)>& f, double abs_tol) {
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, -kSechCutoff, kSechCutoff, 20, 1e-14, &err);
    if (!(err <= abs_tol) || !std::isfinite(val)) {
        throw Error(ErrorCode::QuadratureNotConverged,
                    "error estimate " + std::to_string(err) + " above target");
    }
    return val;
}

}  // namespace

std::string TauCriterion::name() const {
    switch (kind) {
        case CriterionKind::Down: return "down";
        case CriterionKind::Up: return "up";
        case CriterionKind::MinimalAbs: return "minabs";
        case CriterionKind::Branch: return "branch=" + std::to_string(k);
        case CriterionKind::Extended: return "extended=" + std::to_string(k);
    }
    return "unknown";
}

TauCriterion parse_criterion(std::string_view text) {
    if (text == "down") return TauCriterion::down();
    if (text == "up") return TauCriterion::up();
    if (text == "minabs") return TauCriterion::minimal_abs();
    auto parse_k = [&](std::string_view prefix, CriterionKind kind) -> std::optional<TauCriterion> {
        if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
        const auto rest = text.substr(prefix.size());
        int k = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
        if (ec != std::errc() || ptr != rest.data() + rest.size() || rest.empty()) {
            throw Error(ErrorCode::InvalidParams, "bad branch index in criterion '" + std::string(text) + "'");
        }
        return TauCriterion{kind, k};
    };
    if (auto c = parse_k("branch=", CriterionKind::Branch)) return *c;
    if (auto c = parse_k("extended=", CriterionKind::Extended)) return *c;
    throw Error(ErrorCode::InvalidParams, "unknown criterion '" + std::string(text) + "'");
}

RayPoint ray_point(double I, double theta, double tau, const ReducedParams& p) {
    const double r = p.r();
    return {theta - I * tau, r * theta - (r * I - 1.0) * tau};
}

double ray_residual(double I, double theta, double tau, const ReducedParams& p) {
    return RayModel(I, theta, p).g(tau);
}

double tau_max_default(double I, const ReducedParams& p) {
    const double f = std::max(std::min(std::abs(I), std::abs(p.r() * I - 1.0)), 1e-3);
    return 8.0 * kPi * std::max(1.0, 1.0 / f);
}

double march_step(double I, const ReducedParams& p) {
    return std::min(0.05, 0.5 / std::max({std::abs(I), std::abs(p.r() * I - 1.0), 1.0}));
}

std::vector<TauSolution> all_crossings(double I, double theta, const ReducedParams& p,
                                       const TauSearchConfig& cfg) {
    const RayModel m(I, theta, p);
    const double tmax = cfg.tau_max > 0 ? cfg.tau_max : tau_max_default(I, p);
    const double h = march_step(I, p);
    std::vector<double> roots;
    for (int dir : {-1, 1}) {
        RootStream st(m, dir, h, tmax, cfg.tol_root);
        while (!st.exhausted()) st.advance(roots);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) { return std::abs(a - b) <= cfg.tol_root; }),
                roots.end());
    std::vector<TauSolution> out;
    out.reserve(roots.size());
    for (double t : roots) out.push_back(make_solution(m, t, p, cfg));
    return out;
}

TauSolution solve_tau_star(double I, double theta, const TauCriterion& criterion,
                           const ReducedParams& p, const TauSearchConfig& cfg) {
    if (classify(I, p) == CrestKind::Singular) {
        throw Error(ErrorCode::SingularCrest, "crest is singular at I = " + std::to_string(I));
    }
    const RayModel m(I, theta, p);
    const double tmax = cfg.tau_max > 0 ? cfg.tau_max : tau_max_default(I, p);
    const double h = march_step(I, p);

    const bool use_neg = criterion.kind != CriterionKind::Up;
    const bool use_pos = criterion.kind != CriterionKind::Down;
    RootStream neg(m, -1, h, tmax, cfg.tol_root);
    RootStream pos(m, +1, h, tmax, cfg.tol_root);

    std::vector<TauSolution> hits;
    bool any_root = false;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> buf;
    auto consume = [&] {
        for (double t : buf) {
            any_root = true;
            TauSolution s = make_solution(m, t, p, cfg);
            if (!admissible(s, criterion)) continue;
            best = std::min(best, std::abs(t));
            hits.push_back(s);
        }
        buf.clear();
    };
    // Advance the lagging direction until both have passed best + tie tolerance.
    for (;;) {
        const bool neg_live = use_neg && !neg.exhausted() && neg.frontier() <= best + cfg.tol_tie;
        const bool pos_live = use_pos && !pos.exhausted() && pos.frontier() <= best + cfg.tol_tie;
        if (!neg_live && !pos_live) break;
        if (neg_live && (!pos_live || neg.frontier() <= pos.frontier())) {
            neg.advance(buf);
        } else {
            pos.advance(buf);
        }
        consume();
    }

    if (hits.empty()) {
        if (!any_root) {
            throw Error(ErrorCode::TangencyDegenerate,
                        "no crest crossing within |tau| <= " + std::to_string(tmax));
        }
        throw Error(ErrorCode::UnreachableBranch,
                    "criterion " + criterion.name() + " not met within |tau| <= " + std::to_string(tmax));
    }

    std::vector<TauSolution> ties;
    for (const auto& s : hits) {
        if (std::abs(s.tau_star) <= best + cfg.tol_tie) {
            bool dup = false;
            for (const auto& t : ties) dup = dup || std::abs(t.tau_star - s.tau_star) <= cfg.tol_root;
            if (!dup) ties.push_back(s);
        }
    }
    auto pick = std::max_element(ties.begin(), ties.end(), [](const TauSolution& a, const TauSolution& b) {
        return a.transversality < b.transversality;
    });
    TauSolution sol = *pick;
    sol.criterion = criterion;
    sol.ambiguous = ties.size() > 1;
    return sol;
}

double melnikov_closed(double I, double phi, double s, const ReducedParams& p) {
    return amplitude_A1(I, p) * std::cos(phi) + amplitude_A2(I, p) * std::cos(p.r() * phi - s);
}

double melnikov_quadrature(double I, double phi, double s, const ReducedParams& p, double abs_tol) {
    const double r = p.r();
    const double d = r * I - 1.0;
    auto f = [&](double x) {
        const double sech = 1.0 / std::cosh(x);
        return 2.0 * sech * sech *
               (p.a1 * std::cos(phi + I * x) + p.a2 * std::cos(r * phi - s + d * x));
    };
    return gk_integrate(f, abs_tol);
}

double melnikov_integral_literal(double I, double phi, double s, const ReducedParams& p,
                                 double abs_tol) {
    const double r = p.r();
    auto f = [&](double x) {
        const double q0 = separatrix(x, p.pendulum_sign).q0;
        // g(φ + Iσ, s + σ) with g = a1 cos φ + a2 cos(rφ − s)
        const double g = p.a1 * std::cos(phi + I * x) + p.a2 * std::cos(r * (phi + I * x) - (s + x));
        return (std::cos(q0) - 1.0) * g;
    };
    return gk_integrate(f, abs_tol);
}

double reduced_poincare_at(const TauSolution& sol, const ReducedParams& p) {
    return amplitude_A1(sol.I, p) * std::cos(sol.phi) + amplitude_A2(sol.I, p) * std::cos(sol.sigma);
}

double reduced_poincare(double I, double theta, const TauCriterion& criterion,
                        const ReducedParams& p, const TauSearchConfig& cfg) {
    return reduced_poincare_at(solve_tau_star(I, theta, criterion, p, cfg), p);
}

PoincareGradient grad_at(const TauSolution& sol, const ReducedParams& p) {
    const double I = sol.I;
    const double r = p.r();
    const double d = r * I - 1.0;
    const double A1 = amplitude_A1(I, p), A2 = amplitude_A2(I, p);
    const double sp = std::sin(sol.phi), ss = std::sin(sol.sigma);
    PoincareGradient g;
    g.tau = sol;
    g.dTheta_a1_form = d != 0.0 ? A1 * sp / d : std::numeric_limits<double>::quiet_NaN();
    g.dTheta_a2_form = I != 0.0 ? -A2 * ss / I : std::numeric_limits<double>::quiet_NaN();
    g.dTheta = std::abs(d) >= std::abs(I) ? g.dTheta_a1_form : g.dTheta_a2_form;
    g.dI = amplitude_A1_prime(I, p) * std::cos(sol.phi) + amplitude_A2_prime(I, p) * std::cos(sol.sigma) +
           sol.tau_star * (A1 * sp + r * A2 * ss);
    return g;
}

PoincareGradient grad_reduced_poincare(double I, double theta, const TauCriterion& criterion,
                                       const ReducedParams& p, const TauSearchConfig& cfg) {
    return grad_at(solve_tau_star(I, theta, criterion, p, cfg), p);
}

ScatteringState scattering_step(const ScatteringState& state, const TauCriterion& criterion,
                                const ReducedParams& p, const TauSearchConfig& cfg) {
    if (p.eps == 0.0) return {state.I, wrap_angle(state.theta, p.theta_period())};
    const TauSolution sol = solve_tau_star(state.I, state.theta, criterion, p, cfg);
    if (sol.degenerate) {
        throw Error(ErrorCode::TangencyDegenerate, "tau* is degenerate at I = " + std::to_string(state.I) +
                                                       ", theta = " + std::to_string(state.theta));
    }
    const PoincareGradient g = grad_at(sol, p);
    return {state.I + p.eps * g.dTheta, wrap_angle(state.theta - p.eps * g.dI, p.theta_period())};
}

UnreducedState scattering_step_unreduced(const UnreducedState& state, const TauCriterion& criterion,
                                         const ReducedParams& p, const TauSearchConfig& cfg) {
    const double theta = state.phi - state.I * state.s;
    if (p.eps == 0.0) return state;
    const TauSolution sol = solve_tau_star(state.I, theta, criterion, p, cfg);
    if (sol.degenerate) throw Error(ErrorCode::TangencyDegenerate, "tau* is degenerate");
    const PoincareGradient g = grad_at(sol, p);
    UnreducedState out;
    out.I = state.I + p.eps * g.dTheta;
    out.phi = state.phi - p.eps * (g.dI - state.s * g.dTheta);
    out.s = state.s;
    return out;
}

bool extended_map_domain(double I, double theta, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    return std::abs(w.w1 * std::sin(theta)) < std::abs(w.w2);
}

AtlasRegion atlas_region(double theta) {
    const double t = wrap_angle(theta);
    if (std::abs(t - kPi / 2.0) <= kTolDiscontinuity || std::abs(t - 1.5 * kPi) <= kTolDiscontinuity) {
        throw Error(ErrorCode::OnDiscontinuity, "theta on a discontinuity line of the atlas");
    }
    if (t < kPi / 2.0) return AtlasRegion::I;
    if (t < 1.5 * kPi) return AtlasRegion::II;
    return AtlasRegion::III;
}

int atlas_branch(AtlasRegion region) { return static_cast<int>(region) - 1; }

PiecewiseStep piecewise_global_map(const ScatteringState& state, const ReducedParams& p,
                                   const TauSearchConfig& cfg) {
    const double theta = wrap_angle(state.theta);
    PiecewiseStep out;
    out.region = atlas_region(theta);
    out.tau = solve_tau_star(state.I, theta, TauCriterion::minimal_abs(), p, cfg);
    out.next = scattering_step({state.I, theta}, TauCriterion::minimal_abs(), p, cfg);
    try {
        const TauSolution ext =
            solve_tau_star(state.I, theta, TauCriterion::extended(atlas_branch(out.region)), p, cfg);
        out.matches_extended = ext.tau_star == out.tau.tau_star;
    } catch (const Error&) {
        out.matches_extended = false;
    }
    return out;
}

double theta_plus(double I, const ReducedParams& p) {
    auto horizontal = [](double x) {
        if (x <= 0.0 || x >= 1.5) return 1.5 * kPi;
        if (x < 1.0) return (2.0 - x) * kPi;
        return kPi * x;
    };
    auto vertical = [](double x) {
        if (x <= -0.5) return 1.5 * kPi;
        if (x < 0.0) return (1.0 - x) * kPi;
        if (x < 1.0) return (x + 1.0) * kPi;
        if (x == 1.0) return kTwoPi;
        return 1.5 * kPi;
    };
    switch (classify(I, p)) {
        case CrestKind::Horizontal: return horizontal(I);
        case CrestKind::Vertical: return vertical(I);
        case CrestKind::Singular: return std::min(horizontal(I), vertical(I));
    }
    return 1.5 * kPi;
}

}  // namespace pendrot
