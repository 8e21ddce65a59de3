#pragma once

#include <vector>

#include "mfspec/model.hpp"
#include "mfspec/pressure.hpp"

namespace mfspec {

/// Which empirical measure of a cylinder the target constraint looks at.
///   L: every point of the cylinder, L_n u for u in [i] (UL_n[i] inside C).
///   M: the periodic point of the word, M_n i = L_n(iii...).
enum class ConstraintMode { L, M };

/// How a window of per-n pressures is turned into one growth-rate value.
///   Upper: max over the window (limsup proxy).
///   Extrapolated: intercept of the fit v_n = P + c/n over the window, which
///   removes the O(log n / n) prefactor bias of finite cylinder sums.
enum class GrowthEstimate { Upper, Extrapolated };

/// Per-coordinate range of the level vector (S_n Phi_m / S_n Lambda)_m over a
/// cylinder (mode L) or its value at the periodic point (mode M, lo == hi).
struct LevelRange {
    std::vector<double> lo;
    std::vector<double> hi;
};

LevelRange word_level_range(const ModelPotentials& pots, std::span<const int> word, ConstraintMode mode,
                            std::uint64_t budget = kDefaultBudget);

/// The target predicate UL_n[i] (or UM_n[i]) contained in C.
class LevelConstraint {
public:
    LevelConstraint(ModelPotentials pots, TargetBox target, ConstraintMode mode,
                    std::uint64_t budget = kDefaultBudget);

    /// True when the level map only depends on symbol counts.
    [[nodiscard]] bool composition_based() const { return pots_.depth() == 1; }
    [[nodiscard]] bool admits_counts(std::span<const int> counts) const;
    [[nodiscard]] bool admits_word(std::span<const int> word) const;
    [[nodiscard]] const ModelPotentials& potentials() const { return pots_; }
    [[nodiscard]] const TargetBox& target() const { return target_; }

private:
    ModelPotentials pots_;
    TargetBox target_;
    ConstraintMode mode_;
    std::uint64_t budget_;
};

/// log of the constrained cylinder sum at length n; -inf if no word
/// qualifies. Aggregates by composition when phi and the level map are
/// depth 1, enumerates words otherwise.
double constrained_coefficient(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target, int n,
                               ConstraintMode mode, std::uint64_t budget = kDefaultBudget);

struct MfPressureWindow {
    int n_lo = 1;
    int n_hi = 1;
    std::vector<double> per_n;
    double lower = 0.0;
    double upper = 0.0;
    double extrapolated = 0.0;
};

MfPressureWindow mf_pressure_window(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target,
                                    int n_lo, int n_hi, ConstraintMode mode,
                                    std::uint64_t budget = kDefaultBudget);

SeriesCoefficients mf_zeta_series(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target,
                                  int n_max, ConstraintMode mode, std::uint64_t budget = kDefaultBudget);

/// Cylinders of one length that pass a constraint, reduced to what
/// t -> sum exp(sup S_n (t Lambda)) needs: a log-weight (log multiplicity)
/// and the range of S_n Lambda over the cylinder.
struct ScalingTerms {
    int n = 0;
    std::vector<double> log_weight;
    std::vector<double> lambda_lo;
    std::vector<double> lambda_hi;

    [[nodiscard]] bool empty() const { return log_weight.empty(); }
    /// (1/n) log sum_j exp(log_weight_j + sup over the cylinder of t S_n Lambda).
    [[nodiscard]] double pressure(double t) const;
};

/// Growth-rate function t -> P(t Lambda) restricted to cylinders admitted
/// by a filter, over a window of lengths.
class WindowedScalingPressure {
public:
    WindowedScalingPressure(std::vector<ScalingTerms> terms, GrowthEstimate estimate);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] bool all_empty() const { return finite_ns_.empty(); }
    [[nodiscard]] const std::vector<ScalingTerms>& terms() const { return terms_; }

private:
    std::vector<ScalingTerms> terms_;
    std::vector<int> finite_ns_;
    GrowthEstimate estimate_;
};

/// Bowen-equation root of a windowed constrained pressure; -inf when every
/// window length has an empty sum.
double solve_windowed_bowen(const WindowedScalingPressure& pressure, double tol);

/// Shrinking-target root sequence and its r -> 0 estimate.
struct ShrinkingResult {
    std::vector<double> radii;
    std::vector<double> values;
    /// Root for the undilated target (r = 0); -inf when its sums are empty.
    double fixed_value = 0.0;
    /// Intercept of the least-squares line through the last three finite
    /// (r, value) pairs, clamped to [0, last finite value].
    double linear_extrapolation = 0.0;
    /// fixed_value when finite (the target itself is hit along a
    /// subsequence of lengths), linear_extrapolation otherwise.
    double extrapolated = 0.0;
};

/// Combines the two r -> 0 estimates as described in ShrinkingResult.
void finish_shrinking(ShrinkingResult& result);

/// Linear-in-r extrapolation used by every shrinking-target solver.
double extrapolate_to_zero_radius(std::span<const double> radii, std::span<const double> values);

/// r_k = 2^-k, k = 1..count.
std::vector<double> default_radius_schedule(int count = 6);

struct MfBowenOptions {
    int n_max = 400;
    /// Trailing window length; 0 selects 25% of n_max.
    int tail_window = 0;
    double tol = 1e-4;
    ConstraintMode mode = ConstraintMode::L;
    GrowthEstimate estimate = GrowthEstimate::Extrapolated;
    std::uint64_t budget = kDefaultBudget;
};

/// Constrained scaling terms for every n in [n_lo, n_hi].
std::vector<ScalingTerms> constrained_scaling_terms(const ModelSpec& spec, const TargetBox& target, int n_lo,
                                                    int n_hi, ConstraintMode mode,
                                                    std::uint64_t budget = kDefaultBudget);

/// Fixed-target multifractal Bowen root.
double mf_bowen_fixed(const ModelSpec& spec, const TargetBox& target, const MfBowenOptions& options = {});

/// Fixed-target roots against B(C, r) for each radius, then r -> 0.
ShrinkingResult mf_bowen_shrinking(const ModelSpec& spec, const TargetBox& target, std::span<const double> radii,
                                   const MfBowenOptions& options = {});

/// Least n such that every level vector over a cylinder of length n lies
/// within sup-distance r of the periodic-point level vector, from the
/// bound Lip/(n(1 - gamma)) with Lipschitz constants taken in the metric
/// d_gamma over pairs sharing at least one symbol.
int sandwich_threshold(const ModelPotentials& pots, double r, double gamma = 0.5);

/// Lipschitz constant of a depth-k table in d_gamma restricted to pairs at
/// distance <= gamma (common prefix >= 1): max_{1<=j<k} osc_j / gamma^j.
double tail_lipschitz(const PotentialTable& table, double gamma);

/// Full d_gamma Lipschitz constant max_{0<=j<k} osc_j / gamma^j.
double lipschitz_constant(const PotentialTable& table, double gamma);

}  // namespace mfspec
