#include <algorithm>
#include <cmath>
#include <string>

#include "cli.hpp"
#include "pendrot/error.hpp"

namespace pendrot::cli {

namespace {

std::string status_of(ErrorCode code) {
    std::string s(to_string(code));
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

std::vector<double> action_grid(const RunConfig& cfg, double lo, double hi, int n) {
    if (!cfg.I_values.empty()) return cfg.I_values;
    const double a = cfg.I_min.value_or(lo), b = cfg.I_max.value_or(hi);
    const int m = cfg.grid_n.value_or(n);
    if (!(a < b)) throw Error(ErrorCode::InvalidParams, "need I-min < I-max");
    if (m < 2) throw Error(ErrorCode::InvalidParams, "grid-n must be at least 2");
    return linspace(a, b, m);
}

std::vector<double> angle_grid(const RunConfig& cfg, int n) {
    const int m = cfg.theta_n.value_or(cfg.grid_n.value_or(n));
    if (m < 2) throw Error(ErrorCode::InvalidParams, "theta-n must be at least 2");
    std::vector<double> v(m);
    for (int j = 0; j < m; ++j) v[j] = kTwoPi * j / m;
    return v;
}

std::string atlas_label(double theta) {
    try {
        switch (atlas_region(theta)) {
            case AtlasRegion::I: return "I";
            case AtlasRegion::II: return "II";
            case AtlasRegion::III: return "III";
        }
    } catch (const Error&) {
    }
    return "line";
}

const char* family_name(ThresholdFamily f) { return f == ThresholdFamily::Alpha ? "alpha" : "beta"; }

}  // namespace

int cmd_thresholds(const RunConfig& cfg) {
    const Resolved res = resolve(cfg, "thresholds");
    const auto rep = find_thresholds(res.params, cfg.I_min.value_or(kDefaultWindowMin),
                                     cfg.I_max.value_or(kDefaultWindowMax));
    const double nan = std::nan("");
    Sink sink(cfg, res, "thresholds",
              {"record", "family", "name", "I", "lo", "hi", "kind", "tangency", "asymptote", "note"});
    for (const auto* list : {&rep.alpha_thresholds, &rep.beta_thresholds})
        for (const auto& t : *list)
            sink.row({std::string("threshold"), std::string(family_name(t.family)), t.name, t.I, nan, nan,
                      std::string(""), false, nan, std::string("")});
    for (const auto& m : rep.missing)
        sink.row({std::string("missing"), std::string(family_name(m.family)), m.name, nan, nan, nan,
                  std::string(""), false, m.asymptote.value_or(nan), m.reason});
    std::vector<std::pair<double, std::string>> labels;
    for (const auto& [name, I] : rep.labels) labels.emplace_back(I, name);
    std::sort(labels.begin(), labels.end());
    for (const auto& [I, name] : labels)
        sink.row({std::string("label"), std::string(""), name, I, nan, nan, std::string(""), false, nan,
                  std::string("")});
    for (const auto& iv : rep.intervals)
        sink.row({std::string("interval"), std::string(""), std::string(""), nan, iv.lo, iv.hi,
                  std::string(to_string(iv.kind)), iv.tangency, nan, std::string("")});
    return kExitOk;
}

int cmd_crests(const RunConfig& cfg) {
    const Resolved res = resolve(cfg, "crests");
    const auto Is = action_grid(cfg, -3.0, 3.0, 13);
    if (cfg.samples < 2) throw Error(ErrorCode::InvalidParams, "samples must be at least 2");
    const auto angles = linspace(0.0, kTwoPi, cfg.samples);
    struct Pt {
        int k;
        bool horizontal;
        double phi, sigma, residual;
    };
    std::vector<std::vector<Pt>> per_I(Is.size());
    std::vector<CrestKind> kinds(Is.size());
    const ReducedParams& p = res.params;
    parallel_for(Is.size(), res.threads, [&](std::size_t i) {
        const double I = Is[i];
        kinds[i] = classify(I, p);
        for (int k = 0; k <= 2; ++k) {
            if (kinds[i] != CrestKind::Vertical) {
                for (double phi : angles) {
                    try {
                        const double s = crest_sigma(I, phi, k, p);
                        per_I[i].push_back({k, true, phi, s, crest_residual(I, phi, s, p)});
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::OutOfDomain) throw;
                    }
                }
            }
            if (kinds[i] != CrestKind::Horizontal) {
                for (double sigma : angles) {
                    try {
                        const double f = crest_phi(I, sigma, k, p);
                        per_I[i].push_back({k, false, f, sigma, crest_residual(I, f, sigma, p)});
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::OutOfDomain) throw;
                    }
                }
            }
        }
    });
    Sink sink(cfg, res, "crests", {"I", "kind", "parameterization", "branch", "phi", "sigma", "residual"});
    for (std::size_t i = 0; i < Is.size(); ++i)
        for (const auto& pt : per_I[i])
            sink.row({Is[i], std::string(to_string(kinds[i])), std::string(pt.horizontal ? "sigma(phi)" : "phi(sigma)"),
                      static_cast<long long>(pt.k), pt.phi, pt.sigma, pt.residual});
    return kExitOk;
}

namespace {

struct FieldPoint {
    double tau = std::nan("");
    double L = std::nan("");
    double dTheta = std::nan("");
    double phi = std::nan("");
    double sigma = std::nan("");
    double transversality = std::nan("");
    long long branch = 0;
    std::string branch_kind;
    bool degenerate = false;
    bool ambiguous = false;
    std::string status = "ok";
};

std::vector<FieldPoint> tau_field(const std::vector<double>& Is, const std::vector<double>& thetas,
                                  const Resolved& res) {
    std::vector<FieldPoint> out(Is.size() * thetas.size());
    parallel_for(out.size(), res.threads, [&](std::size_t n) {
        const double I = Is[n / thetas.size()], theta = thetas[n % thetas.size()];
        FieldPoint& fp = out[n];
        try {
            const TauSolution sol = solve_tau_star(I, theta, res.criterion, res.params, res.search);
            const PoincareGradient g = grad_at(sol, res.params);
            fp.tau = sol.tau_star;
            fp.L = reduced_poincare_at(sol, res.params);
            fp.dTheta = g.dTheta;
            fp.phi = sol.phi;
            fp.sigma = sol.sigma;
            fp.transversality = sol.transversality;
            fp.branch = sol.branch_hit.k;
            fp.branch_kind = to_string(sol.branch_hit.kind);
            fp.degenerate = sol.degenerate;
            fp.ambiguous = sol.ambiguous;
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::UnreachableBranch:
                case ErrorCode::TangencyDegenerate:
                case ErrorCode::SingularCrest: fp.status = status_of(e.code()); break;
                default: throw;
            }
        }
    });
    return out;
}

}  // namespace

int cmd_portrait(const RunConfig& cfg) {
    const Resolved res = resolve(cfg, "portrait");
    const auto Is = action_grid(cfg, -2.0, 2.0, 81);
    const auto thetas = angle_grid(cfg, 81);
    const auto field = tau_field(Is, thetas, res);
    const bool atlas = res.criterion.kind == CriterionKind::MinimalAbs;
    Sink sink(cfg, res, "portrait",
              {"I", "theta", "L_star", "idot_sign", "atlas_region", "tau_star", "branch", "degenerate", "status"});
    for (std::size_t n = 0; n < field.size(); ++n) {
        const auto& fp = field[n];
        const double theta = thetas[n % thetas.size()];
        const long long sgn = std::isnan(fp.dTheta) ? 0 : (fp.dTheta > 0) - (fp.dTheta < 0);
        sink.row({Is[n / thetas.size()], theta, fp.L, sgn, atlas ? atlas_label(theta) : std::string("-"), fp.tau,
                  fp.branch, fp.degenerate, fp.status});
    }
    return kExitOk;
}

int cmd_tau_field(const RunConfig& cfg) {
    const Resolved res = resolve(cfg, "tau-field");
    const auto Is = action_grid(cfg, -2.0, 2.0, 81);
    const auto thetas = angle_grid(cfg, 81);
    const auto field = tau_field(Is, thetas, res);
    Sink sink(cfg, res, "tau-field",
              {"I", "theta", "tau_star", "branch", "branch_kind", "phi", "sigma", "transversality", "degenerate",
               "ambiguous", "status"});
    for (std::size_t n = 0; n < field.size(); ++n) {
        const auto& fp = field[n];
        sink.row({Is[n / thetas.size()], thetas[n % thetas.size()], fp.tau, fp.branch, fp.branch_kind, fp.phi,
                  fp.sigma, fp.transversality, fp.degenerate, fp.ambiguous, fp.status});
    }
    return kExitOk;
}

int cmd_inner_portrait(const RunConfig& cfg) {
    const Resolved res = resolve(cfg, "inner-portrait");
    const auto Is = action_grid(cfg, -0.5, 1.5, 9);
    if (cfg.samples < 2) throw Error(ErrorCode::InvalidParams, "samples must be at least 2");
    if (!(cfg.duration > 0.0)) throw Error(ErrorCode::InvalidParams, "duration must be positive");
    InnerConfig ode = res.policy.ode;
    std::vector<std::vector<InnerSample>> trajs(Is.size());
    parallel_for(Is.size(), res.threads, [&](std::size_t i) {
        trajs[i] = inner_trajectory({Is[i], cfg.phi0, cfg.s0}, cfg.duration, cfg.samples - 1, res.params, ode);
    });
    Sink sink(cfg, res, "inner-portrait", {"trajectory", "I0", "t", "I", "phi", "s", "region", "torus_value"});
    for (std::size_t i = 0; i < Is.size(); ++i) {
        const TorusRegion region = region_of(Is[i], res.params);
        for (const auto& smp : trajs[i])
            sink.row({static_cast<long long>(i), Is[i], smp.t, smp.x.I, smp.x.phi, smp.x.s,
                      std::string(to_string(region)), torus_value_averaged(smp.x, region, res.params)});
    }
    return kExitOk;
}

int cmd_diffuse(const RunConfig& cfg) {
    const Resolved res = resolve(cfg, "diffuse");
    const PseudoOrbit orbit = build_pseudo_orbit(cfg.I_start, cfg.I_end, res.params, res.policy);
    const VerificationReport rep = verify_pseudo_orbit(orbit);
    const double nan = std::nan("");
    Sink sink(cfg, res, "diffuse",
              {"leg", "type", "run", "region", "I_from", "theta_from", "I_to", "theta_to", "level_from", "level_to",
               "residual", "tau_star", "bracket", "duration"});
    for (std::size_t i = 0; i < orbit.legs.size(); ++i) {
        const auto n = static_cast<long long>(i);
        if (const auto* s = std::get_if<ScatterLeg>(&orbit.legs[i])) {
            sink.row({n, std::string("scatter"), static_cast<long long>(s->run),
                      std::string(to_string(region_of(s->from.I, orbit.params))), s->from.I, s->from.theta, s->to.I,
                      s->to.theta, s->level_from, s->level_to, s->residual, s->tau_star, s->bracket, 0.0});
        } else {
            const auto& in = std::get<InnerLeg>(orbit.legs[i]);
            sink.row({n, std::string("inner"), -1LL, std::string(to_string(in.region)), in.from.I,
                      wrap_angle(in.from.phi), in.to.I, wrap_angle(in.to.phi), in.torus_from, in.torus_to,
                      std::abs(in.torus_to - in.torus_from), nan, nan, in.duration});
        }
    }
    std::vector<std::pair<std::string, Cell>> summary = {
        {"frame_s_shifted", orbit.s_shifted},
        {"left_window", orbit.left_window},
        {"I_start", orbit.I_start},
        {"I_end", orbit.I_end},
        {"final_action", orbit.final_action()},
        {"inner_time", orbit.inner_time},
        {"scatter_legs", static_cast<long long>(rep.scatter_legs)},
        {"inner_legs", static_cast<long long>(rep.inner_legs)},
        {"level_bound", rep.level_bound},
        {"max_level_residual", rep.max_level_residual},
        {"max_step_mismatch", rep.max_step_mismatch},
        {"max_reintegration", rep.max_reintegration},
        {"max_endpoint_gap", rep.max_endpoint_gap},
        {"min_abs_bracket", rep.min_abs_bracket},
        {"tangent_jumps", static_cast<long long>(rep.tangent_jumps)},
        {"max_resonant_drift", rep.max_resonant_drift},
        {"verified", rep.ok},
    };
    for (std::size_t i = 0; i < rep.failures.size(); ++i) summary.emplace_back("failure_" + std::to_string(i), rep.failures[i]);
    sink.summary(summary);
    return rep.ok ? kExitOk : kExitVerify;
}

}  // namespace pendrot::cli
