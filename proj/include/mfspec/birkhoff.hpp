#pragma once

#include "mfspec/mfzeta.hpp"
#include "mfspec/variational.hpp"

namespace mfspec {

/// Lipschitz observable represented by a depth-k table, with its constant in
/// the metric d_gamma(x, y) = gamma^{|common prefix|}.
struct ObservableTable {
    PotentialTable f;
    double gamma = 0.5;
    double lip_bound = 0.0;

    /// Uses the exact table constant max_j osc_j / gamma^j as lip_bound.
    static ObservableTable from_table(PotentialTable f, double gamma = 0.5);

    [[nodiscard]] int depth() const { return f.depth(); }
    /// sup-distance between a Lipschitz function and its depth-k
    /// conditional-expectation table: lip_bound * gamma^k.
    [[nodiscard]] double projection_error() const;
    /// Throws ValidationError on gamma outside (0,1) or a lip_bound below the
    /// table's own constant.
    void validate() const;
};

/// log of sum over words whose periodic Birkhoff average (1/n) S_n f(iii...)
/// lies in C of sup_{[i]} exp S_n phi. Aggregates by composition when f and
/// phi are depth 1.
double erg_constrained_coefficient(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                   const PotentialTable& phi, int n, std::uint64_t budget = kDefaultBudget);

/// Scaling terms of the ergodic constrained sums for n in [n_lo, n_hi].
std::vector<ScalingTerms> erg_scaling_terms(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                            int n_lo, int n_hi, std::uint64_t budget = kDefaultBudget);

/// Bowen root of the windowed ergodic constrained pressure (the mode field of
/// the options is ignored).
double erg_bowen_fixed(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                       const MfBowenOptions& options = {});

ShrinkingResult erg_bowen_shrinking(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                    std::span<const double> radii, const MfBowenOptions& options = {});

/// sup { -h(mu) / int Lambda dmu : int f dmu in C } over the family.
VariationalResult erg_spectrum_variational(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                           MeasureFamily family);

/// |midpoint of the cylinder range of S_n f - S_n f(iii...)|; bounded by
/// lip_bound * gamma / (1 - gamma).
double cylinder_periodic_discrepancy(const ObservableTable& f, std::span<const int> word,
                                     std::uint64_t budget = kDefaultBudget);

}  // namespace mfspec
