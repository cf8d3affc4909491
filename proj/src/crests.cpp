#include "pendrot/crests.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pendrot/error.hpp"

namespace pendrot {

namespace {

// |μα| − 1 and |μβ| − 1 scaled by |w2| and |(rI−1) w2| to remove the poles.
double alpha_gap(double I, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    return std::abs(w.w1) - std::abs(w.w2);
}

double beta_gap(double I, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    const double d = p.r() * I - 1.0;
    return std::abs(I * w.w1) - std::abs(d * w.w2);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double clamp_unit(double x) {
    // tolerate round-off at the edge of the arcsin domain
    if (x > 1.0 && x < 1.0 + 1e-12) return 1.0;
    if (x < -1.0 && x > -1.0 - 1e-12) return -1.0;
    return x;
}

struct Component {
    double lo, hi;
    const char* alpha_name;
    const char* beta_name;
    double asymptote;  // limit of |α| and |β| at the open end, or -1 when bounded
    bool open_low;     // the unbounded end is on the left
};

}  // namespace

const char* to_string(CrestKind kind) noexcept {
    switch (kind) {
        case CrestKind::Horizontal: return "horizontal";
        case CrestKind::Vertical: return "vertical";
        case CrestKind::Singular: return "singular";
    }
    return "unknown";
}

CrestKind classify(double I, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    if (w.w2 == 0.0) return CrestKind::Vertical;
    const double ratio = std::abs(w.w1 / w.w2);
    if (std::abs(ratio - 1.0) <= kTolClassify) return CrestKind::Singular;
    return ratio < 1.0 ? CrestKind::Horizontal : CrestKind::Vertical;
}

double crest_sigma(double I, double phi, int k, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    const double s = std::sin(phi);
    if (std::abs(w.w1 * s) > std::abs(w.w2) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::OutOfDomain, "horizontal parameterization does not cover this phi");
    }
    const double x = w.w2 == 0.0 ? 0.0 : clamp_unit(w.w1 / w.w2 * s);
    const double a = std::asin(x);
    return (k % 2 == 0 ? -a : a) + k * kPi;
}

double crest_phi(double I, double sigma, int k, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    const double s = std::sin(sigma);
    if (std::abs(w.w2 * s) > std::abs(w.w1) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::OutOfDomain, "vertical parameterization does not cover this sigma");
    }
    const double x = w.w1 == 0.0 ? 0.0 : clamp_unit(w.w2 / w.w1 * s);
    const double a = std::asin(x);
    return (k % 2 == 0 ? -a : a) + k * kPi;
}

int horizontal_branch_index(double sigma) {
    if (std::cos(sigma) > 0) return 2 * static_cast<int>(std::lround(sigma / kTwoPi));
    return 2 * static_cast<int>(std::lround((sigma - kPi) / kTwoPi)) + 1;
}

int vertical_branch_index(double phi) { return horizontal_branch_index(phi); }

int crest_branch_index(double I, double phi, double sigma, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    if (std::abs(w.w1) < std::abs(w.w2)) return horizontal_branch_index(sigma);
    return vertical_branch_index(phi);
}

double crest_residual(double I, double phi, double sigma, const ReducedParams& p) {
    const CrestWeights w = crest_weights(I, p);
    return (w.w1 * std::sin(phi) + w.w2 * std::sin(sigma)) / w.scale();
}

bool has_tangency(double I, const ReducedParams& p) {
    return alpha_gap(I, p) * beta_gap(I, p) < 0.0;
}

std::vector<TangencyPoint> tangency_points(double I, const ReducedParams& p) {
    std::vector<TangencyPoint> out;
    if (!has_tangency(I, p)) return out;
    const CrestWeights w = crest_weights(I, p);
    const double d = p.r() * I - 1.0;
    const double c = w.w1 / w.w2;
    const double b = I * c / d;
    const double s2 = (1.0 - b * b) / (c * c - b * b);
    if (!(s2 >= 0.0 && s2 <= 1.0)) return out;
    const double phi0 = std::asin(std::sqrt(s2));
    const CrestKind kind = classify(I, p);
    for (double phi : {phi0, kPi - phi0, kPi + phi0, kTwoPi - phi0}) {
        const double sigma = std::atan2(-c * std::sin(phi), -b * std::cos(phi));
        TangencyPoint tp;
        tp.I = I;
        tp.phi = phi;
        tp.sigma = sigma;
        tp.branch.I = I;
        tp.branch.kind = kind;
        if (kind == CrestKind::Vertical) {
            tp.branch.k = vertical_branch_index(phi);
            tp.angle = sigma;
        } else {
            tp.branch.k = horizontal_branch_index(sigma);
            tp.angle = phi;
        }
        out.push_back(tp);
    }
    return out;
}

const CrestInterval* ClassificationReport::interval_of(double I) const {
    for (const auto& iv : intervals) {
        if (iv.lo < I && I < iv.hi) return &iv;
    }
    return nullptr;
}

ClassificationReport find_thresholds(const ReducedParams& p, double I_min, double I_max) {
    if (p.a1 == 0.0 || p.a2 == 0.0) {
        throw Error(ErrorCode::InvalidParams, "mu = 0: crests are degenerate");
    }
    if (!(I_min < I_max)) throw Error(ErrorCode::InvalidParams, "empty threshold window");

    ClassificationReport rep;
    rep.mu = p.mu();
    rep.r = p.r();
    rep.I_min = I_min;
    rep.I_max = I_max;

    auto fa = [&](double I) { return alpha_gap(I, p); };
    auto fb = [&](double I) { return beta_gap(I, p); };

    auto scan_component = [&](const Component& comp) {
        const double lo = std::max(comp.lo, I_min);
        const double hi = std::min(comp.hi, I_max);
        for (int fam = 0; fam < 2; ++fam) {
            const auto& f = fam == 0 ? std::function<double(double)>(fa)
                                     : std::function<double(double)>(fb);
            const ThresholdFamily family = fam == 0 ? ThresholdFamily::Alpha : ThresholdFamily::Beta;
            const std::string name = fam == 0 ? comp.alpha_name : comp.beta_name;
            auto& list = fam == 0 ? rep.alpha_thresholds : rep.beta_thresholds;
            if (lo < hi && (f(lo) < 0) != (f(hi) < 0)) {
                list.push_back({family, name, bisect(f, lo, hi, kTolThreshold)});
                continue;
            }
            if (comp.asymptote < 0) continue;
            MissingThreshold m;
            m.family = family;
            m.name = name;
            m.asymptote = comp.asymptote;
            // left end: |α| climbs from 0 to e^{π/2}; right end: falls from ∞ to e^{−π/2}
            const double lim = std::abs(rep.mu) * comp.asymptote;
            const bool exists = comp.open_low ? lim > 1.0 : lim < 1.0;
            m.reason = exists ? "outside the analysis window" : "does not exist for this mu";
            rep.missing.push_back(m);
        }
    };

    if (p.unit_ratio()) {
        const double e = std::exp(kPi / 2.0);
        scan_component({-1e300, 0.0, "I_l", "I_-", e, true});
        scan_component({0.0, 1.0, "I_c", "I_0", -1.0, false});
        scan_component({1.0, 1e300, "I_r", "I_+", 1.0 / e, false});
    } else {
        const double step = 1e-3;
        const int n = static_cast<int>(std::ceil((I_max - I_min) / step));
        int ia = 0, ib = 0;
        for (int i = 0; i < n; ++i) {
            const double lo = I_min + (I_max - I_min) * i / n;
            const double hi = I_min + (I_max - I_min) * (i + 1) / n;
            if ((fa(lo) < 0) != (fa(hi) < 0)) {
                rep.alpha_thresholds.push_back({ThresholdFamily::Alpha, "I_alpha" + std::to_string(++ia),
                                                bisect(fa, lo, hi, kTolThreshold)});
            }
            if ((fb(lo) < 0) != (fb(hi) < 0)) {
                rep.beta_thresholds.push_back({ThresholdFamily::Beta, "I_beta" + std::to_string(++ib),
                                               bisect(fb, lo, hi, kTolThreshold)});
            }
        }
    }

    std::vector<double> cuts{I_min, I_max};
    for (const auto& t : rep.alpha_thresholds) cuts.push_back(t.I);
    for (const auto& t : rep.beta_thresholds) cuts.push_back(t.I);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        if (std::abs(p.r() * mid - 1.0) < kSingularityRadius) mid += 0.25 * (cuts[i + 1] - mid);
        rep.intervals.push_back({cuts[i], cuts[i + 1], classify(mid, p), has_tangency(mid, p)});
    }

    if (p.unit_ratio()) {
        auto find = [](const std::vector<Threshold>& v, const char* name) -> std::optional<double> {
            for (const auto& t : v)
                if (t.name == name) return t.I;
            return std::nullopt;
        };
        const auto Il = find(rep.alpha_thresholds, "I_l");
        const auto Ic = find(rep.alpha_thresholds, "I_c");
        const auto Ir = find(rep.alpha_thresholds, "I_r");
        const auto Im = find(rep.beta_thresholds, "I_-");
        const auto I0 = find(rep.beta_thresholds, "I_0");
        const auto Ip = find(rep.beta_thresholds, "I_+");
        auto put = [&](const char* key, const std::optional<double>& v) {
            if (v) rep.labels[key] = *v;
        };
        const double amu = std::abs(rep.mu);
        if (amu <= std::exp(-kPi / 2.0)) {
            put("b", I0);
            put("a", Ic);
            put("A", Ir);
            put("B", Ip);
        } else if (amu >= std::exp(kPi / 2.0)) {
            put("b", Im);
            put("a", Il);
            put("A", Ic);
            put("B", I0);
        } else {
            put("b", Im);
            put("a", Il);
            if (I0 && Ic) {
                put("c", std::min(*I0, *Ic));
                put("C", std::max(*I0, *Ic));
            }
            put("A", Ir);
            put("B", Ip);
        }
    }
    return rep;
}

}  // namespace pendrot
