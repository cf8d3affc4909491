#pragma once

#include <vector>

#include "pendrot/model.hpp"

namespace pendrot {

/// State on the cylinder {p = q = 0}.
struct InnerState {
    double I = 0.0;
    double phi = 0.0;
    double s = 0.0;
};

enum class InnerIntegrator {
    Dopri5,  // adaptive Dormand–Prince 5(4), dense output
    Fehlberg78,
};

struct InnerConfig {
    double tol = 1e-12;
    InnerIntegrator method = InnerIntegrator::Dopri5;
};

inline constexpr double kDefaultOdeTol = 1e-10;

/// Restricted Hamiltonian I²/2 + ε(a1 cos φ + a2 cos(rφ − s)); this is K.
double inner_energy(const InnerState& x, const ReducedParams& p);

/// φ' = I, s' = 1, I' = ε (a1 sin φ + r a2 sin(rφ − s)).
/// Integrates over t (either sign). Exact for ε = 0. Throws StepFailure.
InnerState inner_flow(const InnerState& x0, double t, const ReducedParams& p,
                      const InnerConfig& cfg = {});

struct InnerSample {
    double t = 0.0;
    InnerState x;
};

/// Flow sampled at n + 1 equally spaced times in [0, t] (dense output).
std::vector<InnerSample> inner_trajectory(const InnerState& x0, double t, int n,
                                          const ReducedParams& p, const InnerConfig& cfg = {});

struct EnergyBalance {
    InnerState end;
    /// max over samples of |K(t) − ∫₀ᵗ ∂K/∂s dt − K(0)|
    double max_residual = 0.0;
    /// max over samples of |I'| / (ε (|a1| + r|a2|))
    double max_rate_ratio = 0.0;
};

/// Integrates the flow together with ∫ ∂K/∂s dt and checks the balance at n samples.
EnergyBalance inner_energy_balance(const InnerState& x0, double t, int n, const ReducedParams& p,
                                   const InnerConfig& cfg = {});

enum class TorusRegion { Res0, Res1, NonResonant };

const char* to_string(TorusRegion region) noexcept;

/// Half-width of the resonant regions around I = 0 and I = 1/r.
inline constexpr double kRegionHalfWidth = 0.25;

TorusRegion region_of(double I, const ReducedParams& p);

/// Truncated first-order torus functions:
///   F⁰ = I²/2 + ε a1 cos φ,  F¹ = (I − 1/r)²/2 + ε a2 cos(rφ − s),  F^nr = I²/2.
double torus_value(const InnerState& x, const ReducedParams& p);
double torus_value(const InnerState& x, TorusRegion region, const ReducedParams& p);

/// Same functions evaluated at the first-order averaged action
///   J = I + ε a1 cos φ / I + ε r a2 cos(rφ − s)/(rI − 1),
/// dropping the term of the harmonic that is resonant in the region.
/// Drifts by O(ε²) per period of s, while torus_value drifts by O(ε).
double averaged_action(const InnerState& x, TorusRegion region, const ReducedParams& p);
double torus_value_averaged(const InnerState& x, const ReducedParams& p);
double torus_value_averaged(const InnerState& x, TorusRegion region, const ReducedParams& p);

/// Half-width in I of the resonant pendulum island: 2√(ε|a1|) or 2√(ε|a2|).
double resonance_half_width(TorusRegion region, const ReducedParams& p);

}  // namespace pendrot
