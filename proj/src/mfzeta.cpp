#include "mfspec/mfzeta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfspec/cylinder_sum.hpp"
#include "mfspec/logsum.hpp"

namespace mfspec {

namespace {

std::vector<int> periodic_extension(std::span<const int> word, int tail_len) {
    const auto n = word.size();
    std::vector<int> ext(word.begin(), word.end());
    for (int i = 0; i < tail_len; ++i) ext.push_back(word[static_cast<std::size_t>(i) % n]);
    return ext;
}

void level_point(const ModelPotentials& pots, std::span<const int> extended, int n, std::vector<double>& out) {
    const double den = birkhoff_sum_prefix(pots.scaling, extended, n);
    out.resize(pots.measures.size());
    for (std::size_t m = 0; m < pots.measures.size(); ++m) {
        out[m] = birkhoff_sum_prefix(pots.measures[m], extended, n) / den;
    }
}

}  // namespace

LevelRange word_level_range(const ModelPotentials& pots, std::span<const int> word, ConstraintMode mode,
                            std::uint64_t budget) {
    const int n = static_cast<int>(word.size());
    const int tail_len = pots.depth() - 1;
    const int alphabet = pots.scaling.alphabet_size();
    std::vector<double> point;
    if (mode == ConstraintMode::M || tail_len == 0) {
        level_point(pots, periodic_extension(word, tail_len), n, point);
        return {point, point};
    }
    if (word_count(tail_len, alphabet) > budget) {
        throw DepthExceedsBudget("level map tails exceed the enumeration budget");
    }
    LevelRange range{std::vector<double>(pots.measures.size(), std::numeric_limits<double>::infinity()),
                     std::vector<double>(pots.measures.size(), -std::numeric_limits<double>::infinity())};
    std::vector<int> ext(word.begin(), word.end());
    ext.resize(static_cast<std::size_t>(n + tail_len));
    WordOdometer tails(tail_len, alphabet);
    do {
        std::copy(tails.current().begin(), tails.current().end(), ext.begin() + n);
        level_point(pots, ext, n, point);
        for (std::size_t m = 0; m < point.size(); ++m) {
            range.lo[m] = std::min(range.lo[m], point[m]);
            range.hi[m] = std::max(range.hi[m], point[m]);
        }
    } while (tails.next());
    return range;
}

LevelConstraint::LevelConstraint(ModelPotentials pots, TargetBox target, ConstraintMode mode, std::uint64_t budget)
    : pots_(std::move(pots)), target_(std::move(target)), mode_(mode), budget_(budget) {
    if (target_.dimension() != pots_.measures.size()) {
        throw ValidationError("target box dimension must equal the number of measures M");
    }
}

bool LevelConstraint::admits_counts(std::span<const int> counts) const {
    double den = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) den += counts[i] * pots_.scaling.at_index(i);
    std::vector<double> point(pots_.measures.size());
    for (std::size_t m = 0; m < point.size(); ++m) {
        double num = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) num += counts[i] * pots_.measures[m].at_index(i);
        point[m] = num / den;
    }
    return target_.contains(point);
}

bool LevelConstraint::admits_word(std::span<const int> word) const {
    const LevelRange r = word_level_range(pots_, word, mode_, budget_);
    return target_.contains(r.lo, r.hi);
}

double constrained_coefficient(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target, int n,
                               ConstraintMode mode, std::uint64_t budget) {
    const LevelConstraint constraint(build_potentials(spec), target, mode, budget);
    if (phi.depth() == 1 && constraint.composition_based()) {
        const CompositionFilter filter = [&](std::span<const int> counts) { return constraint.admits_counts(counts); };
        return composition_log_sum(phi, n, &filter);
    }
    bool rejected_any = false;
    const WordFilter filter = [&](std::span<const int> word) {
        const bool ok = constraint.admits_word(word);
        rejected_any = rejected_any || !ok;
        return ok;
    };
    const double value = word_log_sum(phi, n, &filter, budget);
    // A vacuous constraint must reproduce the unconstrained route exactly.
    if (!rejected_any) return cylinder_log_sum(phi, n, budget);
    return value;
}

MfPressureWindow mf_pressure_window(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target,
                                    int n_lo, int n_hi, ConstraintMode mode, std::uint64_t budget) {
    if (n_lo < 1 || n_hi < n_lo) throw ValidationError("pressure window needs 1 <= n_lo <= n_hi");
    MfPressureWindow win;
    win.n_lo = n_lo;
    win.n_hi = n_hi;
    std::vector<int> ns;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double c = constrained_coefficient(spec, phi, target, n, mode, budget);
        win.per_n.push_back(c == kNegInf ? kNegInf : c / n);
        ns.push_back(n);
    }
    const TailFit fit = fit_tail(ns, win.per_n);
    win.lower = fit.lower;
    win.upper = fit.upper;
    win.extrapolated = fit.intercept;
    return win;
}

SeriesCoefficients mf_zeta_series(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target,
                                  int n_max, ConstraintMode mode, std::uint64_t budget) {
    if (n_max < 1) throw ValidationError("n_max must be at least 1");
    SeriesCoefficients out;
    out.description = std::string("constrained zeta mode=") + (mode == ConstraintMode::L ? "L" : "M");
    for (int n = 1; n <= n_max; ++n) out.log_a.push_back(constrained_coefficient(spec, phi, target, n, mode, budget));
    return out;
}

double ScalingTerms::pressure(double t) const {
    if (log_weight.empty()) return kNegInf;
    // Shift by the largest term so the sum starts at 1.
    double shift = kNegInf;
    for (std::size_t j = 0; j < log_weight.size(); ++j) {
        shift = std::max(shift, log_weight[j] + std::max(t * lambda_lo[j], t * lambda_hi[j]));
    }
    ShiftedLogSum acc(shift);
    for (std::size_t j = 0; j < log_weight.size(); ++j) {
        acc.add(log_weight[j] + std::max(t * lambda_lo[j], t * lambda_hi[j]));
    }
    return acc.value() / n;
}

WindowedScalingPressure::WindowedScalingPressure(std::vector<ScalingTerms> terms, GrowthEstimate estimate)
    : terms_(std::move(terms)), estimate_(estimate) {
    for (const auto& t : terms_) {
        if (!t.empty()) finite_ns_.push_back(t.n);
    }
}

double WindowedScalingPressure::operator()(double t) const {
    std::vector<int> ns;
    std::vector<double> values;
    for (const auto& term : terms_) {
        if (term.empty()) continue;
        ns.push_back(term.n);
        values.push_back(term.pressure(t));
    }
    const TailFit fit = fit_tail(ns, values);
    return estimate_ == GrowthEstimate::Upper ? fit.upper : fit.intercept;
}

double solve_windowed_bowen(const WindowedScalingPressure& pressure, double tol) {
    if (pressure.all_empty()) return kNegInf;
    return bowen_root(pressure, 0.0, 1.0, {.tol = tol});
}

std::vector<ScalingTerms> constrained_scaling_terms(const ModelSpec& spec, const TargetBox& target, int n_lo,
                                                    int n_hi, ConstraintMode mode, std::uint64_t budget) {
    const LevelConstraint constraint(build_potentials(spec), target, mode, budget);
    const PotentialTable& lam = constraint.potentials().scaling;
    const int alphabet = spec.alphabet_size;
    std::vector<ScalingTerms> out;
    for (int n = n_lo; n <= n_hi; ++n) {
        ScalingTerms terms;
        terms.n = n;
        if (constraint.composition_based()) {
            CompositionOdometer odo(n, alphabet);
            do {
                const auto counts = odo.current();
                if (!constraint.admits_counts(counts)) continue;
                double s = 0.0;
                for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i] * lam.at_index(i);
                terms.log_weight.push_back(log_multinomial(counts));
                terms.lambda_lo.push_back(s);
                terms.lambda_hi.push_back(s);
            } while (odo.next());
        } else {
            require_word_budget(n, alphabet, budget);
            WordOdometer odo(n, alphabet);
            do {
                const auto word = odo.current();
                if (!constraint.admits_word(word)) continue;
                const BirkhoffRange r = cylinder_birkhoff_range(lam, word, budget);
                terms.log_weight.push_back(0.0);
                terms.lambda_lo.push_back(r.lo);
                terms.lambda_hi.push_back(r.hi);
            } while (odo.next());
        }
        out.push_back(std::move(terms));
    }
    return out;
}

double mf_bowen_fixed(const ModelSpec& spec, const TargetBox& target, const MfBowenOptions& options) {
    if (options.n_max < 1) throw ValidationError("n_max must be at least 1");
    const int window = options.tail_window > 0 ? std::min(options.tail_window, options.n_max)
                                               : default_tail_window(options.n_max);
    const WindowedScalingPressure pressure(
        constrained_scaling_terms(spec, target, options.n_max - window + 1, options.n_max, options.mode,
                                  options.budget),
        options.estimate);
    return solve_windowed_bowen(pressure, options.tol);
}

double extrapolate_to_zero_radius(std::span<const double> radii, std::span<const double> values) {
    std::vector<double> r, v;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (values[i] != kNegInf) {
            r.push_back(radii[i]);
            v.push_back(values[i]);
        }
    }
    if (v.empty()) return kNegInf;
    if (v.size() < 3) return v.back();
    const std::size_t first = v.size() - 3;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = first; i < v.size(); ++i) {
        sx += r[i];
        sy += v[i];
        sxx += r[i] * r[i];
        sxy += r[i] * v[i];
    }
    const double det = 3.0 * sxx - sx * sx;
    if (det <= 0.0) return v.back();
    const double slope = (3.0 * sxy - sx * sy) / det;
    // The limit of a nonempty shrinking target is a dimension (>= 0) and the
    // sequence is nonincreasing as r -> 0.
    return std::clamp((sy - slope * sx) / 3.0, 0.0, std::max(0.0, v.back()));
}

void finish_shrinking(ShrinkingResult& result) {
    result.linear_extrapolation = extrapolate_to_zero_radius(result.radii, result.values);
    result.extrapolated = result.fixed_value != kNegInf ? result.fixed_value : result.linear_extrapolation;
}

std::vector<double> default_radius_schedule(int count) {
    std::vector<double> radii;
    for (int k = 1; k <= count; ++k) radii.push_back(std::ldexp(1.0, -k));
    return radii;
}

ShrinkingResult mf_bowen_shrinking(const ModelSpec& spec, const TargetBox& target, std::span<const double> radii,
                                   const MfBowenOptions& options) {
    if (radii.size() < 3) throw ScheduleTooShort("shrinking-target schedule needs at least three radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
            throw ValidationError("radius schedule must be positive and strictly decreasing");
        }
    }
    ShrinkingResult result;
    result.radii.assign(radii.begin(), radii.end());
    for (double r : radii) result.values.push_back(mf_bowen_fixed(spec, target.dilate(r), options));
    result.fixed_value = mf_bowen_fixed(spec, target, options);
    finish_shrinking(result);
    return result;
}

double tail_lipschitz(const PotentialTable& table, double gamma) {
    double lip = 0.0;
    for (int j = 1; j < table.depth(); ++j) lip = std::max(lip, table.oscillation(j) / std::pow(gamma, j));
    return lip;
}

double lipschitz_constant(const PotentialTable& table, double gamma) {
    return std::max(table.oscillation(0), tail_lipschitz(table, gamma));
}

int sandwich_threshold(const ModelPotentials& pots, double r, double gamma) {
    if (!(r > 0.0)) throw ValidationError("sandwich radius must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
    // |S_n Lambda| >= n * lam_min on every point.
    const double lam_min = -pots.scaling.max_value();
    const double lip_lam = tail_lipschitz(pots.scaling, gamma);
    double lip = 0.0;
    for (const auto& phi : pots.measures) {
        const double amp = std::max(std::abs(phi.min_value()), std::abs(phi.max_value()));
        // Tail differences of S_n g are bounded by Lip* * sum_{j>=1} gamma^j
        // = Lip* * gamma / (1 - gamma); the ratio rule then combines numerator
        // and denominator.
        const double k = gamma * (tail_lipschitz(phi, gamma) / lam_min + amp * lip_lam / (lam_min * lam_min));
        lip = std::max(lip, k);
    }
    if (lip == 0.0) return 1;
    return static_cast<int>(std::floor(lip / (r * (1.0 - gamma)))) + 1;
}

}  // namespace mfspec
