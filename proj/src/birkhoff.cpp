#include "mfspec/birkhoff.hpp"

#include <cmath>

#include "mfspec/cylinder_sum.hpp"
#include "mfspec/logsum.hpp"

namespace mfspec {

namespace {

void require_scalar(const TargetBox& target) {
    if (target.dimension() != 1) throw ValidationError("Birkhoff targets are intervals in R (dimension 1)");
}

bool admits_average(const TargetBox& target, double sum, int n) {
    const std::array<double, 1> avg{sum / n};
    return target.contains(avg);
}

double count_sum(const PotentialTable& g, std::span<const int> counts) {
    double s = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i] * g.at_index(i);
    return s;
}

}  // namespace

ObservableTable ObservableTable::from_table(PotentialTable f, double gamma) {
    ObservableTable obs{std::move(f), gamma, 0.0};
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
    obs.lip_bound = lipschitz_constant(obs.f, gamma);
    return obs;
}

double ObservableTable::projection_error() const { return lip_bound * std::pow(gamma, f.depth()); }

void ObservableTable::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
    const double own = lipschitz_constant(f, gamma);
    if (lip_bound < own * (1.0 - 1e-12)) {
        throw ValidationError("lip_bound is below the table's own Lipschitz constant " + std::to_string(own));
    }
}

double erg_constrained_coefficient(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                   const PotentialTable& phi, int n, std::uint64_t budget) {
    require_scalar(target);
    if (f.f.alphabet_size() != spec.alphabet_size || phi.alphabet_size() != spec.alphabet_size) {
        throw ValidationError("observable and potential must use the model alphabet");
    }
    if (f.depth() == 1 && phi.depth() == 1) {
        const CompositionFilter filter = [&](std::span<const int> counts) {
            return admits_average(target, count_sum(f.f, counts), n);
        };
        return composition_log_sum(phi, n, &filter);
    }
    bool rejected_any = false;
    const WordFilter filter = [&](std::span<const int> word) {
        const bool ok = admits_average(target, periodic_birkhoff_sum(f.f, word), n);
        rejected_any = rejected_any || !ok;
        return ok;
    };
    const double value = word_log_sum(phi, n, &filter, budget);
    if (!rejected_any) return cylinder_log_sum(phi, n, budget);
    return value;
}

std::vector<ScalingTerms> erg_scaling_terms(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                            int n_lo, int n_hi, std::uint64_t budget) {
    require_scalar(target);
    const ModelPotentials pots = build_potentials(spec);
    const PotentialTable& lam = pots.scaling;
    const int alphabet = spec.alphabet_size;
    std::vector<ScalingTerms> out;
    for (int n = n_lo; n <= n_hi; ++n) {
        ScalingTerms terms;
        terms.n = n;
        if (f.depth() == 1 && lam.depth() == 1) {
            CompositionOdometer odo(n, alphabet);
            do {
                const auto counts = odo.current();
                if (!admits_average(target, count_sum(f.f, counts), n)) continue;
                const double s = count_sum(lam, counts);
                terms.log_weight.push_back(log_multinomial(counts));
                terms.lambda_lo.push_back(s);
                terms.lambda_hi.push_back(s);
            } while (odo.next());
        } else {
            require_word_budget(n, alphabet, budget);
            WordOdometer odo(n, alphabet);
            do {
                const auto word = odo.current();
                if (!admits_average(target, periodic_birkhoff_sum(f.f, word), n)) continue;
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

double erg_bowen_fixed(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                       const MfBowenOptions& options) {
    if (options.n_max < 1) throw ValidationError("n_max must be at least 1");
    const int window = options.tail_window > 0 ? std::min(options.tail_window, options.n_max)
                                               : default_tail_window(options.n_max);
    const WindowedScalingPressure pressure(
        erg_scaling_terms(spec, f, target, options.n_max - window + 1, options.n_max, options.budget),
        options.estimate);
    return solve_windowed_bowen(pressure, options.tol);
}

ShrinkingResult erg_bowen_shrinking(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                    std::span<const double> radii, const MfBowenOptions& options) {
    if (radii.size() < 3) throw ScheduleTooShort("shrinking-target schedule needs at least three radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) {
            throw ValidationError("radius schedule must be positive and strictly decreasing");
        }
    }
    ShrinkingResult result;
    result.radii.assign(radii.begin(), radii.end());
    for (double r : radii) result.values.push_back(erg_bowen_fixed(spec, f, target.dilate(r), options));
    result.fixed_value = erg_bowen_fixed(spec, f, target, options);
    finish_shrinking(result);
    return result;
}

VariationalResult erg_spectrum_variational(const ModelSpec& spec, const ObservableTable& f, const TargetBox& target,
                                           MeasureFamily family) {
    require_scalar(target);
    const ModelPotentials pots = build_potentials(spec);
    CellProblem p;
    p.family = family;
    p.alphabet_size = spec.alphabet_size;
    p.lambda = cell_values(pots.scaling, family);
    const std::vector<double> fc = cell_values(f.f, family);
    add_linear_bounds(p, fc, target.lo(0), target.hi(0));
    VariationalResult res = solve_cell_problem(p, VariationalForm::Dimension);
    res.level = {cell_integral(fc, res.weights)};
    return res;
}

double cylinder_periodic_discrepancy(const ObservableTable& f, std::span<const int> word, std::uint64_t budget) {
    const BirkhoffRange r = cylinder_birkhoff_range(f.f, word, budget);
    return std::abs(0.5 * (r.lo + r.hi) - periodic_birkhoff_sum(f.f, word));
}

}  // namespace mfspec
