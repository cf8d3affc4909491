#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pendrot/crests.hpp"
#include "pendrot/model.hpp"

namespace pendrot {

enum class CriterionKind {
    Down,        // first maxima-family crossing with τ ≤ 0
    Up,          // first maxima-family crossing with τ ≥ 0
    MinimalAbs,  // smallest |τ| over every crossing
    Branch,      // branch k in the crest's native parameterization
    Extended,    // branch k of the horizontal labelling, continued into vertical territory
};

struct TauCriterion {
    CriterionKind kind = CriterionKind::MinimalAbs;
    int k = 0;

    static TauCriterion down() { return {CriterionKind::Down, 0}; }
    static TauCriterion up() { return {CriterionKind::Up, 0}; }
    static TauCriterion minimal_abs() { return {CriterionKind::MinimalAbs, 0}; }
    static TauCriterion branch(int k) { return {CriterionKind::Branch, k}; }
    static TauCriterion extended(int k) { return {CriterionKind::Extended, k}; }

    std::string name() const;
    bool operator==(const TauCriterion&) const = default;
};

/// Accepts down, up, minabs, branch=K, extended=K. Throws InvalidParams.
TauCriterion parse_criterion(std::string_view text);

struct TauSearchConfig {
    double tol_root = 1e-12;
    double tol_degen = 1e-6;
    double tol_tie = 1e-9;
    /// ≤ 0 selects 8π·max(1, 1/min(|I|, |rI−1|)).
    double tau_max = 0.0;
};

struct TauSolution {
    double tau_star = 0.0;
    double I = 0.0;
    double theta = 0.0;
    double phi = 0.0;    // θ − Iτ*
    double sigma = 0.0;  // rθ − (rI−1)τ*
    CrestBranch branch_hit;
    TauCriterion criterion;
    /// |d/dτ| of the normalized crest residual at τ*.
    double transversality = 0.0;
    bool degenerate = false;
    /// Another admissible crossing lies within tol_tie in |τ|.
    bool ambiguous = false;
};

/// Point of the NHIM line through the diagonal point at parameter τ.
struct RayPoint {
    double phi;
    double sigma;
};
RayPoint ray_point(double I, double theta, double tau, const ReducedParams& p);

/// Normalized crest residual along the ray: (w1 sin φ + w2 sin σ)/max|w|.
double ray_residual(double I, double theta, double tau, const ReducedParams& p);

double tau_max_default(double I, const ReducedParams& p);
double march_step(double I, const ReducedParams& p);

/// Every crossing of the ray with the crest in [−τ_max, τ_max], sorted by τ.
std::vector<TauSolution> all_crossings(double I, double theta, const ReducedParams& p,
                                       const TauSearchConfig& cfg = {});

/// Throws SingularCrest, TangencyDegenerate (no crossing at all) or
/// UnreachableBranch (no crossing satisfies the criterion).
TauSolution solve_tau_star(double I, double theta, const TauCriterion& criterion,
                           const ReducedParams& p, const TauSearchConfig& cfg = {});

/// ℒ(I, φ, s) = A1 cos φ + A2 cos(rφ − s).
double melnikov_closed(double I, double phi, double s, const ReducedParams& p);

/// Gauss–Kronrod quadrature of ∫ 2 sech²σ · g(φ + Iσ, s + σ) dσ, the
/// potential with the sign that matches the closed form.
/// Throws QuadratureNotConverged.
double melnikov_quadrature(double I, double phi, double s, const ReducedParams& p,
                           double abs_tol = 1e-10);

/// The integral ∫ (cos q0(σ) − 1) · g(φ + Iσ, s + σ) dσ taken literally. Equals
/// −melnikov_closed.
double melnikov_integral_literal(double I, double phi, double s, const ReducedParams& p,
                                 double abs_tol = 1e-10);

/// ℒ*(I, θ) = A1 cos(θ − Iτ*) + A2 cos(rθ − (rI−1)τ*).
double reduced_poincare(double I, double theta, const TauCriterion& criterion,
                        const ReducedParams& p, const TauSearchConfig& cfg = {});
double reduced_poincare_at(const TauSolution& sol, const ReducedParams& p);

struct PoincareGradient {
    double dI = 0.0;
    double dTheta = 0.0;
    /// A1 sin φ* / (rI − 1)
    double dTheta_a1_form = 0.0;
    /// −A2 sin σ* / I
    double dTheta_a2_form = 0.0;
    TauSolution tau;
};

PoincareGradient grad_reduced_poincare(double I, double theta, const TauCriterion& criterion,
                                       const ReducedParams& p, const TauSearchConfig& cfg = {});
PoincareGradient grad_at(const TauSolution& sol, const ReducedParams& p);

struct ScatteringState {
    double I = 0.0;
    double theta = 0.0;
};

/// First-order scattering map (I + ε ∂θℒ*, θ − ε ∂Iℒ*), θ reduced mod 2π·r_den.
/// Throws TangencyDegenerate when τ* is degenerate.
ScatteringState scattering_step(const ScatteringState& state, const TauCriterion& criterion,
                                const ReducedParams& p, const TauSearchConfig& cfg = {});

struct UnreducedState {
    double I = 0.0;
    double phi = 0.0;
    double s = 0.0;
};

/// Same map in (I, φ, s); s is left unchanged.
UnreducedState scattering_step_unreduced(const UnreducedState& state,
                                         const TauCriterion& criterion, const ReducedParams& p,
                                         const TauSearchConfig& cfg = {});

/// True iff |μα_r(I) sin θ| < 1, i.e. the horizontal parameterization
/// covers the diagonal point (θ, rθ).
bool extended_map_domain(double I, double theta, const ReducedParams& p);

inline constexpr double kTolDiscontinuity = 1e-9;

enum class AtlasRegion { I = 1, II = 2, III = 3 };

struct PiecewiseStep {
    ScatteringState next;
    AtlasRegion region = AtlasRegion::II;
    TauSolution tau;
    /// The region's extended map lands on the same crossing.
    bool matches_extended = false;
};

/// Region of the minimal-|τ| atlas: I on (0, π/2), II on (π/2, 3π/2), III on (3π/2, 2π).
/// Throws OnDiscontinuity within kTolDiscontinuity of π/2 or 3π/2.
AtlasRegion atlas_region(double theta);
int atlas_branch(AtlasRegion region);

PiecewiseStep piecewise_global_map(const ScatteringState& state, const ReducedParams& p,
                                   const TauSearchConfig& cfg = {});

/// Right end of the window (π, θ₊) on which the branch-1 map increases I,
/// for r = 1 and a1, a2 > 0.
double theta_plus(double I, const ReducedParams& p);

}  // namespace pendrot
