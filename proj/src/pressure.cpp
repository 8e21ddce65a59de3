#include "mfspec/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfspec/cylinder_sum.hpp"
#include "mfspec/logsum.hpp"

namespace mfspec {

TailFit fit_tail(std::span<const int> ns, std::span<const double> values) {
    TailFit fit;
    fit.lower = std::numeric_limits<double>::infinity();
    fit.upper = kNegInf;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double v = values[i];
        if (v == kNegInf) continue;
        fit.lower = std::min(fit.lower, v);
        fit.upper = std::max(fit.upper, v);
        const double x = 1.0 / ns[i];
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
        ++fit.finite_count;
    }
    if (fit.finite_count == 0) {
        fit.lower = fit.upper = fit.intercept = kNegInf;
        return fit;
    }
    if (fit.finite_count < 3) {
        fit.intercept = fit.upper;
        return fit;
    }
    const double k = fit.finite_count;
    const double det = k * sxx - sx * sx;
    if (det <= 0.0) {
        fit.intercept = fit.upper;
        return fit;
    }
    fit.slope = (k * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / k;
    return fit;
}

int default_tail_window(int n_max) { return std::max(1, n_max / 4); }

double pressure_level(const PotentialTable& phi, int n, std::uint64_t budget) {
    return cylinder_log_sum(phi, n, budget) / n;
}

double pressure_exact(const PotentialTable& phi) {
    if (phi.depth() != 1) throw DepthUnsupported("closed-form pressure needs a depth-1 potential");
    return log_sum_exp(phi.values());
}

SeriesCoefficients zeta_coefficients(const PotentialTable& phi, int n_max, std::uint64_t budget) {
    if (n_max < 1) throw ValidationError("n_max must be at least 1");
    SeriesCoefficients out;
    out.description = "zeta depth=" + std::to_string(phi.depth());
    out.log_a.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) out.log_a.push_back(cylinder_log_sum(phi, n, budget));
    return out;
}

RadiusEstimate radius_estimate(const SeriesCoefficients& c, int tail_window) {
    const int n_max = c.n_max();
    if (tail_window < 1 || tail_window > n_max) throw ValidationError("tail window must lie in [1, n_max]");
    RadiusEstimate est;
    est.tail_window = tail_window;
    est.per_n_values.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double la = c.at(n);
        est.per_n_values.push_back(la == kNegInf ? kNegInf : la / n);
    }
    std::vector<int> ns;
    for (int n = n_max - tail_window + 1; n <= n_max; ++n) ns.push_back(n);
    const auto tail = std::span<const double>(est.per_n_values).subspan(static_cast<std::size_t>(n_max - tail_window));
    const TailFit fit = fit_tail(ns, tail);
    if (fit.finite_count == 0) throw AllEmpty("every coefficient in the tail window is an empty sum; radius is +inf");
    est.log_radius = -fit.upper;
    est.trend_diagnostic = fit.slope;
    est.extrapolated_log_radius = -fit.intercept;
    return est;
}

double bowen_root(const std::function<double(double)>& pressure, double lo, double hi,
                  const BisectionOptions& options) {
    if (!(lo < hi)) throw BracketFailure("bracket requires lo < hi");
    double p_lo = pressure(lo);
    double p_hi = pressure(hi);
    double step = hi - lo;
    while (!(p_lo > 0.0)) {
        if (p_lo == 0.0) return lo;
        hi = lo;
        p_hi = p_lo;
        lo -= step;
        step *= 2.0;
        if (hi - lo > options.max_span) {
            throw BracketFailure("no positive pressure found below t = " + std::to_string(hi));
        }
        p_lo = pressure(lo);
    }
    step = hi - lo;
    while (!(p_hi < 0.0)) {
        if (p_hi == 0.0) return hi;
        lo = hi;
        p_lo = p_hi;
        hi += step;
        step *= 2.0;
        if (hi - lo > options.max_span) {
            throw BracketFailure("no negative pressure found above t = " + std::to_string(lo));
        }
        p_hi = pressure(hi);
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < options.max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        const double p = pressure(mid);
        if (std::abs(p) <= options.tol) return mid;
        if (p > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
    }
    return mid;
}

double bowen_dimension(const ModelSpec& spec, double tol) {
    const ModelPotentials pots = build_potentials(spec);
    if (pots.scaling.depth() != 1) {
        throw DepthUnsupported("closed-form Bowen root needs a depth-1 scaling potential");
    }
    const PotentialTable& lam = pots.scaling;
    return bowen_root([&](double t) { return pressure_exact(lam.scaled(t)); }, 0.0, 1.0, {.tol = tol});
}

double bowen_dimension_series(const ModelSpec& spec, int n, double tol, std::uint64_t budget) {
    const ModelPotentials pots = build_potentials(spec);
    const PotentialTable& lam = pots.scaling;
    return bowen_root([&](double t) { return pressure_level(lam.scaled(t), n, budget); }, 0.0, 1.0, {.tol = tol});
}

}  // namespace mfspec
