#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pendrot/inner.hpp"
#include "pendrot/scattering.hpp"

namespace pendrot {

/// {F, ℒ*} = ∂θF ∂Iℒ* − ∂IF ∂θℒ* on the section s = 0, with F the torus
/// function of the region of I.
double poisson_bracket(double I, double theta, const TauCriterion& criterion, const ReducedParams& p,
                       const TauSearchConfig& cfg = {});

inline constexpr double kTolBracket = 1e-6;

struct TransversalityReport {
    double I = 0.0;
    double theta = 0.0;
    TorusRegion region = TorusRegion::NonResonant;
    double bracket = 0.0;
    bool transversal = false;
};

TransversalityReport transversality(double I, double theta, const TauCriterion& criterion,
                                    const ReducedParams& p, double tol_bracket = kTolBracket);

struct DiffusionPolicy {
    double delta = 0.05;           // ρ = π + δ
    double margin_coeff = 10.0;    // margin = margin_coeff·ε²
    double level_coeff = 10.0;     // |Δℒ*| ≤ level_coeff·ε² per jump
    double t_max_coeff = 1e3;      // t_max = t_max_coeff/ε
    double eps_cap = 0.05;
    double theta_start = -1.0;     // < 0: middle of the window at I_start
    int samples_per_leg = 8;
    double torus_drift_coeff = 10.0;  // resonant inner legs: |ΔF| ≤ coeff·ε²
    InnerConfig ode{};
};

struct ScatterLeg {
    ScatteringState from;
    ScatteringState to;
    double level_from = 0.0;
    double level_to = 0.0;
    double residual = 0.0;  // |level_to − level_from|
    double tau_star = 0.0;
    double bracket = 0.0;
    int run = 0;
};

struct InnerLeg {
    InnerState from;
    InnerState to;
    double duration = 0.0;
    TorusRegion region = TorusRegion::NonResonant;
    double torus_from = 0.0;  // averaged torus value at the endpoints
    double torus_to = 0.0;
    std::vector<InnerSample> samples;
};

using Leg = std::variant<ScatterLeg, InnerLeg>;

/// Orbits are stored in a normalized frame with μ > 0; when the input had
/// μ < 0 the frame is shifted by s ↦ s + π, which flips a2. When both
/// amplitudes are negative the window (2π − θ₊, π − δ) replaces (π + δ, θ₊).
struct PseudoOrbit {
    ReducedParams params;  // normalized frame
    ReducedParams input_params;
    bool s_shifted = false;
    bool left_window = false;
    DiffusionPolicy policy;
    double rho = 0.0;
    double I_start = 0.0;
    double I_end = 0.0;
    double inner_time = 0.0;
    std::vector<Leg> legs;

    std::size_t scatter_count() const;
    std::size_t inner_count() const;
    /// Action reached by the last leg.
    double final_action() const;
};

/// Normalized-frame state expressed in the input frame (undoes s ↦ s + π).
InnerState to_input_frame(const PseudoOrbit& orbit, const InnerState& x);

/// Alternates branch-1 scattering jumps inside the window with inner-flow
/// arcs of one period 2π, until I ≥ I_end. Requires r = 1, a1·a2 ≠ 0,
/// 0 < ε ≤ eps_cap and I_start < I_end. Throws InvalidParams, WindowEmpty or
/// StuckAtResonance.
PseudoOrbit build_pseudo_orbit(double I_start, double I_end, const ReducedParams& params,
                               const DiffusionPolicy& policy = {});

struct VerificationReport {
    bool ok = false;
    std::size_t scatter_legs = 0;
    std::size_t inner_legs = 0;
    bool reached_end = false;
    double level_bound = 0.0;
    double max_level_residual = 0.0;
    double max_step_mismatch = 0.0;
    double step_mismatch_bound = 1e-10;
    double max_reintegration = 0.0;
    double reintegration_bound = 1e-8;
    double max_endpoint_gap = 0.0;
    bool action_increases = true;
    bool monotone_runs = true;
    bool inside_window = true;
    double min_abs_bracket = 0.0;
    std::size_t tangent_jumps = 0;
    double max_resonant_drift = 0.0;
    double resonant_drift_bound = 0.0;
    std::vector<std::string> failures;
};

/// Recomputes every leg independently: fresh τ* solves and ℒ* levels, a
/// re-integration of each inner arc with a different integrator, shared
/// endpoints, window margins and brackets.
VerificationReport verify_pseudo_orbit(const PseudoOrbit& orbit);

}  // namespace pendrot
