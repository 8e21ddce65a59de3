#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mfspec/model.hpp"
#include "mfspec/symbolic.hpp"

namespace mfspec {

/// log a_n, n = 1..n_max, of a power series sum a_n z^n / n. Empty sums are
/// stored as -inf.
struct SeriesCoefficients {
    std::vector<double> log_a;
    std::string description;

    [[nodiscard]] int n_max() const { return static_cast<int>(log_a.size()); }
    [[nodiscard]] double at(int n) const { return log_a[static_cast<std::size_t>(n - 1)]; }
};

/// Least-squares fit v_n = intercept + slope / n over the finite entries of a
/// window of per-n values, together with their min and max.
struct TailFit {
    double lower = 0.0;
    double upper = 0.0;
    double intercept = 0.0;
    double slope = 0.0;
    int finite_count = 0;
};

/// Fits `values[i]` (the per-n value at n = ns[i]); -inf entries are skipped.
/// With fewer than three finite points the intercept falls back to `upper`.
TailFit fit_tail(std::span<const int> ns, std::span<const double> values);

/// Radius of convergence of a series from the growth of its coefficients.
struct RadiusEstimate {
    /// -(max of (1/n) log a_n over the tail window): the limsup proxy.
    double log_radius = 0.0;
    int tail_window = 0;
    /// (1/n) log a_n for every n = 1..n_max.
    std::vector<double> per_n_values;
    /// Slope in 1/n of the tail regression; near zero once the sequence has
    /// settled.
    double trend_diagnostic = 0.0;
    /// -(intercept of the same regression), a 1/n-extrapolated estimate.
    double extrapolated_log_radius = 0.0;
};

/// Trailing 25% of 1..n_max, at least one index.
int default_tail_window(int n_max);

/// (1/n) log sum_{|i|=n} sup_{[i]} exp S_n phi.
double pressure_level(const PotentialTable& phi, int n, std::uint64_t budget = kDefaultBudget);

/// log sum_i exp phi([i]); depth-1 tables only.
double pressure_exact(const PotentialTable& phi);

SeriesCoefficients zeta_coefficients(const PotentialTable& phi, int n_max, std::uint64_t budget = kDefaultBudget);

/// Throws AllEmpty when every coefficient in the tail window is -inf.
RadiusEstimate radius_estimate(const SeriesCoefficients& c, int tail_window);

struct BisectionOptions {
    double tol = 1e-10;
    /// Largest bracket width the automatic expansion may reach.
    double max_span = 1e4;
    int max_iterations = 500;
};

/// Root of a strictly decreasing function by bisection. The bracket
/// [lo, hi] is widened automatically until P(lo) > 0 > P(hi).
double bowen_root(const std::function<double(double)>& pressure, double lo, double hi,
                  const BisectionOptions& options = {});

/// Root s of P(s Lambda) = 0 with the closed-form depth-1 pressure.
double bowen_dimension(const ModelSpec& spec, double tol = 1e-10);

/// Root of t -> pressure_level(t Lambda, n) for scaling tables of any depth.
double bowen_dimension_series(const ModelSpec& spec, int n, double tol = 1e-4,
                              std::uint64_t budget = kDefaultBudget);

}  // namespace mfspec
