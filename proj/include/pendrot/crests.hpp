#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pendrot/model.hpp"

namespace pendrot {

inline constexpr double kTolClassify = 1e-9;
inline constexpr double kTolThreshold = 1e-10;
inline constexpr double kDefaultWindowMin = -5.0;
inline constexpr double kDefaultWindowMax = 5.0;

enum class CrestKind { Horizontal, Vertical, Singular };

const char* to_string(CrestKind kind) noexcept;

/// Branch k of the crest at action I. Branch k is the lift through the
/// point (φ, σ) = (kπ, kπ); even k belong to the maxima family, odd k to
/// the minima family.
struct CrestBranch {
    int k = 0;
    CrestKind kind = CrestKind::Horizontal;
    double I = 0.0;
};

struct CrestPoint {
    double I = 0.0;
    double phi = 0.0;
    double sigma = 0.0;
    CrestBranch branch;
};

/// Horizontal iff |μα_r(I)| < 1, computed pole-free as |w1| < |w2|.
CrestKind classify(double I, const ReducedParams& p);

/// σ = ξ_k(I, φ) = ∓arcsin(μα sin φ) + kπ (minus for even k). Unwrapped.
/// Throws OutOfDomain when |μα sin φ| > 1.
double crest_sigma(double I, double phi, int k, const ReducedParams& p);

/// φ = η_k(I, σ) = ∓arcsin(sin σ / (μα)) + kπ. Throws OutOfDomain when
/// |sin σ / (μα)| > 1.
double crest_phi(double I, double sigma, int k, const ReducedParams& p);

/// Branch index of a point already on the crest, in the parameterization
/// native to the crest kind (σ-based for horizontal, φ-based for vertical).
int crest_branch_index(double I, double phi, double sigma, const ReducedParams& p);

/// Branch index as a horizontal-crest label (σ-based), regardless of kind.
/// This labels the continuation of horizontal branches used by extended maps.
int horizontal_branch_index(double sigma);
int vertical_branch_index(double phi);

/// Residual w1 sin φ + w2 sin σ normalized by max(|w1|, |w2|).
double crest_residual(double I, double phi, double sigma, const ReducedParams& p);

/// (|μα| − 1)(|μβ| − 1) < 0, evaluated pole-free.
bool has_tangency(double I, const ReducedParams& p);

struct TangencyPoint {
    double I = 0.0;
    /// φ for horizontal crests, σ for vertical crests.
    double angle = 0.0;
    double phi = 0.0;
    double sigma = 0.0;
    CrestBranch branch;
};

/// All tangency points with one period of φ, each mapped onto its branch.
/// Empty when has_tangency is false.
std::vector<TangencyPoint> tangency_points(double I, const ReducedParams& p);

enum class ThresholdFamily { Alpha, Beta };

struct Threshold {
    ThresholdFamily family = ThresholdFamily::Alpha;
    std::string name;
    double I = 0.0;
};

/// A threshold that exists for some μ but was not found in the window.
struct MissingThreshold {
    ThresholdFamily family = ThresholdFamily::Alpha;
    std::string name;
    std::string reason;
    /// Limit of |α| or |β| on the relevant side; the threshold exists only
    /// when 1/|μ| lies strictly between it and the value at the other end.
    std::optional<double> asymptote;
};

struct CrestInterval {
    double lo = 0.0;
    double hi = 0.0;
    CrestKind kind = CrestKind::Horizontal;
    bool tangency = false;
};

struct ClassificationReport {
    double mu = 0.0;
    double r = 1.0;
    double I_min = kDefaultWindowMin;
    double I_max = kDefaultWindowMax;
    std::vector<Threshold> alpha_thresholds;
    std::vector<Threshold> beta_thresholds;
    std::vector<MissingThreshold> missing;
    std::vector<CrestInterval> intervals;
    /// Ordered labels b < a < c ≤ C < A < B (subset per μ regime); r = 1 only.
    std::map<std::string, double> labels;

    /// Interval containing I, or nullptr if I is a threshold or outside.
    const CrestInterval* interval_of(double I) const;
};

/// Solutions of |μα_r(I)| = 1 and |μβ_r(I)| = 1 in [I_min, I_max].
/// For r = 1 brackets come from the monotone components (−∞,0), (0,1),
/// (1,∞); otherwise from a grid scan. Throws InvalidParams for μ = 0.
ClassificationReport find_thresholds(const ReducedParams& p,
                                     double I_min = kDefaultWindowMin,
                                     double I_max = kDefaultWindowMax);

}  // namespace pendrot
