#pragma once

#include <numbers>

namespace pendrot {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Inside this distance of a removable singularity (or of the α pole) the
/// closed forms are replaced by their Taylor expansion (or rejected).
inline constexpr double kSingularityRadius = 1e-4;

/// Physical parameters of
///   H = ±(p²/2 + cos q − 1) + I²/2 + ε cos q (a1 cos(k1 φ + l1 s) + a2 cos(k2 φ + l2 s)).
struct SystemParams {
    double a1 = 1.0;
    double a2 = 1.0;
    int k1 = 1;
    int k2 = 1;
    int l1 = 0;
    int l2 = -1;
    double eps = 0.0;
    int pendulum_sign = +1;

    double mu() const { return a1 / a2; }
    int delta() const { return k1 * l2 - k2 * l1; }

    /// Throws InvalidParams when a1·a2 = 0 or the harmonics are dependent.
    void require_diffusive() const;
};

/// Reduced two-harmonic model every numerical routine works with:
///   H = ±(p²/2 + cos q − 1) + I²/2 + ε cos q (a1 cos φ + a2 cos(r φ − s)),
/// with r = r_num / r_den in (0, 1]. The canonical case r = 1 is the
/// perturbation a1 cos φ + a2 cos(φ − s).
struct ReducedParams {
    double a1 = 1.0;
    double a2 = 1.0;
    double eps = 0.0;
    int r_num = 1;
    int r_den = 1;
    int pendulum_sign = +1;

    static ReducedParams canonical(double a1, double a2, double eps);

    double r() const { return static_cast<double>(r_num) / r_den; }
    double mu() const { return a1 / a2; }
    bool unit_ratio() const { return r_num == r_den; }
    /// Action of the second resonance (I = 1/r).
    double resonance_action() const { return static_cast<double>(r_den) / r_num; }
    /// Period of the reduced Poincaré function in θ: 2π·r_den.
    double theta_period() const { return kTwoPi * r_den; }

    void validate() const;
};

/// Change of variables from SystemParams to ReducedParams:
///   I_red = orientation · (k1 I + l1),  φ_red = orientation · (k1 φ + l1 s),  ε_red = ε k1².
struct Reduction {
    ReducedParams reduced;
    int k1 = 1;
    int l1 = 0;
    int orientation = +1;
    bool harmonics_swapped = false;

    double reduced_action(double I) const { return orientation * (k1 * I + l1); }
    double original_action(double I_red) const {
        return (orientation * I_red - l1) / static_cast<double>(k1);
    }
    double reduced_angle(double phi, double s) const { return orientation * (k1 * phi + l1 * s); }
};

/// Throws InvalidParams if the harmonics cannot be brought to the reduced
/// form with r in (0, 1] and unit time frequency (|Δ / k1| = 1).
Reduction reduce(const SystemParams& params);

/// Point (p0, q0) of the unperturbed separatrix at time τ.
struct SeparatrixPoint {
    double tau = 0.0;
    double p0 = 0.0;
    double q0 = 0.0;
};

SeparatrixPoint separatrix(double tau, int sign);

/// sinh(x)/x, with the removable singularity at 0 patched by Taylor series.
double sinhc(double x);
/// csch(x)·(x coth x − 1) = sinhc'(x)/sinhc(x)², finite for every x.
double sinhc_log_slope(double x);
/// sinh(a)/sinh(b) without overflow for large arguments.
double sinh_ratio(double a, double b);
/// Same, with a − b supplied by the caller to avoid cancellation.
double sinh_ratio(double a, double b, double a_minus_b);

struct AmplitudePair {
    double I = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
};

/// A1(I) = 2π I a1 / sinh(π I / 2); A1(0) = 4 a1.
double amplitude_A1(double I, const ReducedParams& p);
/// A2(I) = 2π (rI − 1) a2 / sinh(π (rI − 1) / 2); A2(1/r) = 4 a2.
double amplitude_A2(double I, const ReducedParams& p);
double amplitude_A1_prime(double I, const ReducedParams& p);
double amplitude_A2_prime(double I, const ReducedParams& p);
AmplitudePair amplitudes(double I, const ReducedParams& p);

/// α(I) = I² sinh(π(I−1)/2) / ((I−1)² sinh(πI/2)). Throws PoleAtOne near I = 1.
double alpha(double I);
/// β(I) = I α(I) / (I − 1). Throws PoleAtOne near I = 1.
double beta(double I);
/// α_r(I) = I² sinh(π(rI−1)/2) / ((rI−1)² sinh(πI/2)). Throws PoleAtOneOverR near I = 1/r.
double alpha_r(double I, double r);
/// β_r(I) = I α_r(I) / (rI − 1).
double beta_r(double I, double r);

/// Weights of the crest residual  w1 sin φ + w2 sin σ = 0,  w1 = I·A1, w2 = (rI−1)·A2.
/// Pole-free replacement for μ α_r sin φ + sin σ = 0 (μα_r = w1 / w2).
struct CrestWeights {
    double w1 = 0.0;
    double w2 = 0.0;

    double scale() const;
};

CrestWeights crest_weights(double I, const ReducedParams& p);

/// Reduce an angle to [0, period).
double wrap_angle(double x, double period = kTwoPi);

}  // namespace pendrot
