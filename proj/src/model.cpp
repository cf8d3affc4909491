#include "pendrot/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "pendrot/error.hpp"

namespace pendrot {

namespace {

// Beyond this, exp() of the argument is handled explicitly.
constexpr double kLargeArg = 20.0;

void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::InvalidParams, msg);
}

}  // namespace

void SystemParams::require_diffusive() const {
    require(std::isfinite(a1) && std::isfinite(a2), "amplitudes must be finite");
    require(a1 != 0.0 && a2 != 0.0, "a1*a2 = 0: the system is integrable or autonomous");
    require(delta() != 0, "k1*l2 - k2*l1 = 0: harmonics are not independent");
    require(eps >= 0.0 && std::isfinite(eps), "eps must be finite and >= 0");
    require(pendulum_sign == 1 || pendulum_sign == -1, "pendulum_sign must be +1 or -1");
}

ReducedParams ReducedParams::canonical(double a1, double a2, double eps) {
    ReducedParams p;
    p.a1 = a1;
    p.a2 = a2;
    p.eps = eps;
    return p;
}

void ReducedParams::validate() const {
    require(std::isfinite(a1) && std::isfinite(a2), "amplitudes must be finite");
    require(a2 != 0.0, "a2 = 0: mu is undefined");
    require(eps >= 0.0 && std::isfinite(eps), "eps must be finite and >= 0");
    require(r_num > 0 && r_den > 0 && r_num <= r_den, "r must be a fraction in (0, 1]");
    require(pendulum_sign == 1 || pendulum_sign == -1, "pendulum_sign must be +1 or -1");
}

Reduction reduce(const SystemParams& params) {
    int k1 = params.k1, l1 = params.l1, k2 = params.k2, l2 = params.l2;
    double a1 = params.a1, a2 = params.a2;
    require(k1 != 0 || k2 != 0, "both k1 and k2 vanish");
    bool swapped = false;
    if (std::abs(k2) > std::abs(k1)) {
        std::swap(k1, k2);
        std::swap(l1, l2);
        std::swap(a1, a2);
        swapped = true;
    }
    require(k2 != 0, "k2 = 0 is not a two-harmonic rotor coupling");
    const int delta = k1 * l2 - k2 * l1;
    require(delta != 0, "k1*l2 - k2*l1 = 0: harmonics are not independent");
    // k2 φ + l2 s = r φ̄ − ν s with φ̄ = k1 φ + l1 s, r = k2/k1, ν = −Δ/k1.
    require(std::abs(delta) == std::abs(k1),
            "only |k1*l2 - k2*l1| = |k1| reduces to the form a1 cos(phi) + a2 cos(r phi - s)");
    const int nu = -delta / k1;
    const bool r_negative = (k1 < 0) != (k2 < 0);
    const int orientation = ((nu < 0) != r_negative) ? -1 : +1;

    const int g = std::gcd(std::abs(k1), std::abs(k2));
    Reduction red;
    red.k1 = k1;
    red.l1 = l1;
    red.orientation = orientation;
    red.harmonics_swapped = swapped;
    red.reduced.a1 = a1;
    red.reduced.a2 = a2;
    red.reduced.eps = params.eps * static_cast<double>(k1) * k1;
    red.reduced.r_num = std::abs(k2) / g;
    red.reduced.r_den = std::abs(k1) / g;
    red.reduced.pendulum_sign = params.pendulum_sign;
    return red;
}

SeparatrixPoint separatrix(double tau, int sign) {
    SeparatrixPoint pt;
    pt.tau = tau;
    const double s = sign >= 0 ? 1.0 : -1.0;
    pt.p0 = s * 2.0 / std::cosh(tau);
    pt.q0 = 4.0 * std::atan(std::exp(s * tau));
    return pt;
}

double sinhc(double x) {
    const double ax = std::abs(x);
    if (ax < kSingularityRadius) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    if (ax > 710.0) return std::numeric_limits<double>::infinity();
    return std::sinh(x) / x;
}

double sinhc_log_slope(double x) {
    const double ax = std::abs(x);
    const double sgn = x < 0 ? -1.0 : 1.0;
    if (ax < 1e-3) {
        const double x2 = x * x;
        return x / 3.0 - 7.0 * x * x2 / 90.0;
    }
    if (ax > 700.0) return 0.0;
    if (ax > kLargeArg) {
        // csch x (x coth x − 1) ≈ 2 e^{−|x|} (|x| − 1), odd in x
        const double e2 = std::exp(-2.0 * ax);
        const double csch = 2.0 * std::exp(-ax) / (1.0 - e2);
        const double coth = (1.0 + e2) / (1.0 - e2);
        return sgn * csch * (ax * coth - 1.0);
    }
    return (x * std::cosh(x) - std::sinh(x)) / (std::sinh(x) * std::sinh(x));
}

double sinh_ratio(double a, double b) { return sinh_ratio(a, b, a - b); }

double sinh_ratio(double a, double b, double a_minus_b) {
    const double aa = std::abs(a), ab = std::abs(b);
    if (aa <= kLargeArg && ab <= kLargeArg) return std::sinh(a) / std::sinh(b);
    const double sa = a < 0 ? -1.0 : (a > 0 ? 1.0 : 0.0);
    const double sb = b < 0 ? -1.0 : 1.0;
    // |a| − |b| without cancellation when the signs agree
    const double gap = (sa == sb) ? sb * a_minus_b : aa - ab;
    return sa * sb * std::exp(gap) * (-std::expm1(-2.0 * aa)) / (-std::expm1(-2.0 * ab));
}

double amplitude_A1(double I, const ReducedParams& p) {
    return 4.0 * p.a1 / sinhc(kPi * I / 2.0);
}

double amplitude_A2(double I, const ReducedParams& p) {
    return 4.0 * p.a2 / sinhc(kPi * (p.r() * I - 1.0) / 2.0);
}

// d/dI [4a / sinhc(c·x)] = −4a·c·sinhc'/sinhc²
double amplitude_A1_prime(double I, const ReducedParams& p) {
    return -4.0 * p.a1 * (kPi / 2.0) * sinhc_log_slope(kPi * I / 2.0);
}

double amplitude_A2_prime(double I, const ReducedParams& p) {
    const double r = p.r();
    return -4.0 * p.a2 * r * (kPi / 2.0) * sinhc_log_slope(kPi * (r * I - 1.0) / 2.0);
}

AmplitudePair amplitudes(double I, const ReducedParams& p) {
    return AmplitudePair{I, amplitude_A1(I, p), amplitude_A2(I, p)};
}

double alpha_r(double I, double r) {
    const double d = r * I - 1.0;
    if (std::abs(I - 1.0 / r) < kSingularityRadius) {
        throw Error(r == 1.0 ? ErrorCode::PoleAtOne : ErrorCode::PoleAtOneOverR,
                    "alpha evaluated at its pole I = " + std::to_string(I));
    }
    if (I == 0.0) return 0.0;
    const double x = kPi * I / 2.0;
    const double y = kPi * d / 2.0;
    if (std::abs(x) < 1.0) return I / d * sinhc(y) / sinhc(x);
    return (I / d) * (I / d) * sinh_ratio(y, x, kPi * ((r - 1.0) * I - 1.0) / 2.0);
}

double beta_r(double I, double r) {
    return I * alpha_r(I, r) / (r * I - 1.0);
}

double alpha(double I) { return alpha_r(I, 1.0); }

double beta(double I) { return beta_r(I, 1.0); }

double CrestWeights::scale() const { return std::max(std::abs(w1), std::abs(w2)); }

CrestWeights crest_weights(double I, const ReducedParams& p) {
    const double d = p.r() * I - 1.0;
    return CrestWeights{I * amplitude_A1(I, p), d * amplitude_A2(I, p)};
}

double wrap_angle(double x, double period) {
    double y = std::fmod(x, period);
    if (y < 0) y += period;
    if (y >= period) y -= period;
    return y;
}

}  // namespace pendrot
