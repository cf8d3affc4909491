#include <cmath>
#include <random>

#include "cli.hpp"
#include "pendrot/error.hpp"

namespace pendrot::cli {

namespace {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    long long samples = 0;
    long long skipped = 0;
    bool pass = true;
    std::string note;
};

CheckResult make_check(std::string name, double bound) {
    CheckResult c;
    c.name = std::move(name);
    c.bound = bound;
    return c;
}

CheckResult melnikov_check(const Resolved& res, int n, bool flip_a2) {
    CheckResult c = make_check("melnikov_closed_vs_quadrature", res.checks.at("melnikov_tol"));
    ReducedParams closed = res.params;
    if (flip_a2) closed.a2 = -closed.a2;
    const auto Is = linspace(-3.0, 3.0, n);
    std::vector<double> err(static_cast<std::size_t>(n) * n * n);
    parallel_for(err.size(), res.threads, [&](std::size_t m) {
        const double I = Is[m / (n * n)];
        const double phi = kTwoPi * ((m / n) % n) / n, s = kTwoPi * (m % n) / n;
        err[m] = std::abs(melnikov_closed(I, phi, s, closed) - melnikov_quadrature(I, phi, s, res.params, 1e-12));
    });
    for (double e : err) c.value = std::max(c.value, e);
    c.samples = static_cast<long long>(err.size());
    c.pass = c.value <= c.bound;
    return c;
}

// Fixed-step march along the ray; returns the first crossing accepted by keep().
template <class Keep>
std::optional<double> march(double I, double theta, const ReducedParams& p, int dir, double h, double tau_max,
                            Keep&& keep) {
    const double r = p.r(), d = r * I - 1.0;
    const auto w = crest_weights(I, p);
    auto g = [&](double t) { return w.w1 * std::sin(theta - I * t) + w.w2 * std::sin(r * theta - d * t); };
    double t0 = 0.0, g0 = g(0.0);
    if (g0 == 0.0 && keep(0.0)) return 0.0;
    const long steps = static_cast<long>(tau_max / h);
    for (long i = 1; i <= steps; ++i) {
        const double t1 = dir * h * i, g1 = g(t1);
        if ((g0 < 0) != (g1 < 0) && g1 != 0.0) {
            const double t = t0 + (t1 - t0) * g0 / (g0 - g1);
            if (keep(t)) return t;
        }
        t0 = t1;
        g0 = g1;
    }
    return std::nullopt;
}

CheckResult tau_check(const Resolved& res, int queries, unsigned seed) {
    CheckResult c = make_check("tau_star_vs_ray_march", res.checks.at("tau_tol"));
    const ReducedParams& p = res.params;
    const double h = res.checks.at("ray_step");
    const TauCriterion crits[] = {TauCriterion::down(), TauCriterion::up(), TauCriterion::minimal_abs(),
                                  TauCriterion::branch(1)};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uI(-3.0, 3.0), ut(0.0, kTwoPi);
    struct Query {
        double I, theta;
        TauCriterion crit;
    };
    std::vector<Query> qs;
    for (int i = 0; i < queries; ++i) {
        const double I = uI(rng), theta = ut(rng);
        qs.push_back({I, theta, crits[i % 4]});
    }
    std::vector<double> err(qs.size(), -1.0);
    parallel_for(qs.size(), res.threads, [&](std::size_t m) {
        const auto& q = qs[m];
        const CrestKind kind = classify(q.I, p);
        if (kind == CrestKind::Singular) return;
        TauSolution sol;
        try {
            sol = solve_tau_star(q.I, q.theta, q.crit, p, res.search);
        } catch (const Error&) {
            return;
        }
        if (sol.degenerate || sol.ambiguous) return;
        const double r = p.r(), d = r * q.I - 1.0;
        auto label = [&](double t) {
            const double a = kind == CrestKind::Horizontal ? r * q.theta - d * t : q.theta - q.I * t;
            return static_cast<long>(std::lround(a / kPi));
        };
        const double tmax = tau_max_default(q.I, p);
        std::optional<double> found;
        switch (q.crit.kind) {
            case CriterionKind::Down:
            case CriterionKind::Up: {
                const int dir = q.crit.kind == CriterionKind::Down ? -1 : 1;
                found = march(q.I, q.theta, p, dir, h, tmax, [&](double t) { return label(t) % 2 == 0; });
                break;
            }
            default: {
                auto keep = [&](double t) {
                    return q.crit.kind == CriterionKind::MinimalAbs || label(t) == q.crit.k;
                };
                const auto a = march(q.I, q.theta, p, -1, h, tmax, keep);
                const auto b = march(q.I, q.theta, p, 1, h, tmax, keep);
                if (a && (!b || std::abs(*a) < std::abs(*b))) found = a;
                else found = b;
            }
        }
        if (found) err[m] = std::abs(*found - sol.tau_star);
        else err[m] = std::numeric_limits<double>::infinity();
    });
    for (double e : err) {
        if (e < 0) {
            ++c.skipped;
            continue;
        }
        ++c.samples;
        c.value = std::max(c.value, e);
    }
    c.pass = c.value <= c.bound;
    return c;
}

CheckResult symmetry_check(const Resolved& res, int n) {
    CheckResult c = make_check("even_branch_symmetry", res.checks.at("symmetry_tol"));
    const ReducedParams& p = res.params;
    if (!p.unit_ratio()) {
        c.note = "requires r = 1";
        return c;
    }
    const auto Is = linspace(-3.0, 3.0, n);
    std::vector<double> err(static_cast<std::size_t>(n) * n, -1.0);
    parallel_for(err.size(), res.threads, [&](std::size_t m) {
        const double I = Is[m / n], theta = kTwoPi * (m % n + 0.5) / n;
        if (has_tangency(I, p) || classify(I, p) == CrestKind::Singular) return;
        try {
            const double a = grad_reduced_poincare(I, theta, TauCriterion::branch(0), p, res.search).dTheta;
            const double b = grad_reduced_poincare(I, kTwoPi - theta, TauCriterion::branch(2), p, res.search).dTheta;
            err[m] = std::abs(a + b);
        } catch (const Error&) {
        }
    });
    for (double e : err) {
        if (e < 0) ++c.skipped;
        else {
            ++c.samples;
            c.value = std::max(c.value, e);
        }
    }
    c.pass = c.value <= c.bound;
    return c;
}

CheckResult window_sign_check(const Resolved& res) {
    CheckResult c = make_check("window_action_increase", 0.0);
    const ReducedParams& p = res.params;
    if (!p.unit_ratio() || !(p.a1 > 0) || !(p.a2 > 0)) {
        c.note = "requires r = 1 and a1, a2 > 0";
        return c;
    }
    std::vector<double> Is;
    for (double I : linspace(-2.0, 2.0, 81))
        if (std::abs(I) >= 0.01 && std::abs(I - 1.0) >= 0.01) Is.push_back(I);
    constexpr int kTheta = 50;
    std::vector<int> bad(Is.size() * kTheta, 0);
    parallel_for(bad.size(), res.threads, [&](std::size_t m) {
        const double I = Is[m / kTheta];
        if (classify(I, p) == CrestKind::Singular) {
            bad[m] = -1;
            return;
        }
        const double lo = kPi + 1e-3, hi = theta_plus(I, p) - 1e-3;
        const double theta = lo + (hi - lo) * (m % kTheta) / (kTheta - 1);
        try {
            bad[m] = grad_reduced_poincare(I, theta, TauCriterion::branch(1), p, res.search).dTheta > 0 ? 0 : 1;
        } catch (const Error&) {
            bad[m] = 1;
        }
    });
    for (int b : bad) {
        if (b < 0) {
            ++c.skipped;
            continue;
        }
        ++c.samples;
        c.value += b;
    }
    c.pass = c.value == 0;
    c.note = "value counts points without an action increase";
    return c;
}

}  // namespace

int cmd_verify(const RunConfig& cfg) {
    const Resolved res = resolve(cfg, "verify");
    if (!cfg.inject_fault.empty() && cfg.inject_fault != "a2-sign") {
        throw Error(ErrorCode::InvalidParams, "unknown fault '" + cfg.inject_fault + "'");
    }
    std::vector<CheckResult> checks;
    checks.push_back(melnikov_check(res, cfg.grid_n.value_or(8), cfg.inject_fault == "a2-sign"));
    checks.push_back(tau_check(res, cfg.samples, cfg.seed));
    checks.push_back(symmetry_check(res, cfg.theta_n.value_or(cfg.grid_n.value_or(40))));
    checks.push_back(window_sign_check(res));
    Sink sink(cfg, res, "verify", {"check", "value", "bound", "samples", "skipped", "pass", "note"});
    bool ok = true;
    for (const auto& c : checks) {
        sink.row({c.name, c.value, c.bound, c.samples, c.skipped, c.pass, c.note});
        ok = ok && c.pass;
    }
    sink.summary({{"all_passed", ok}});
    return ok ? kExitOk : kExitVerify;
}

}  // namespace pendrot::cli
