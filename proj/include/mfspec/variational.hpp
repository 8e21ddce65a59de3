#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "mfspec/model.hpp"

namespace mfspec {

enum class MeasureFamily { Bernoulli, Markov1 };
enum class VariationalForm {
    /// h(mu) + int phi dmu
    Pressure,
    /// -h(mu) / int Lambda dmu
    Dimension,
};

/// Entropy maximization over a measure family under linear constraints.
///
/// A measure is described by its cell weights: w_i for Bernoulli, the
/// two-symbol marginal Q_ij (row-major) for Markov1. Every integral of a
/// depth-1 (Bernoulli) or depth <= 2 (Markov1) table is linear in the cells.
struct CellProblem {
    MeasureFamily family = MeasureFamily::Bernoulli;
    int alphabet_size = 0;
    /// Objective potential per cell (Pressure form).
    std::vector<double> phi;
    /// Scaling potential per cell (Dimension form); must integrate to < 0.
    std::vector<double> lambda;
    /// row . w <= 0
    std::vector<std::vector<double>> le_rows;
    /// row . w == 0
    std::vector<std::vector<double>> eq_rows;

    [[nodiscard]] int cell_count() const;
};

struct VariationalResult {
    double value = 0.0;
    MeasureFamily family = MeasureFamily::Bernoulli;
    /// Cell weights of the maximizer (see CellProblem).
    std::vector<double> weights;
    double entropy = 0.0;
    /// Achieved constraint values: level map (spectrum) or int f (birkhoff).
    std::vector<double> level;
};

struct ScalarMaximum {
    double x = 0.0;
    double value = -std::numeric_limits<double>::infinity();
};

/// Maximizes a quasi-concave function on [lo, hi]: scan a grid of the given
/// step, then golden-section search in the bracket around the best node.
ScalarMaximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double grid_step);

/// Cell vector of a table for the family; DepthUnsupported when the
/// integral is not linear in the cells (Bernoulli depth > 1, Markov1 depth > 2).
std::vector<double> cell_values(const PotentialTable& table, MeasureFamily family);

double cell_entropy(MeasureFamily family, int alphabet_size, std::span<const double> w);

inline double cell_integral(std::span<const double> g, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) s += g[c] * w[c];
    return s;
}

/// lo <= (num . w) / (den . w) <= hi for den . w < 0. Infinite bounds are
/// skipped; lo == hi becomes an equality.
void add_ratio_bounds(CellProblem& p, std::span<const double> num, std::span<const double> den, double lo,
                      double hi);
/// lo <= f . w <= hi.
void add_linear_bounds(CellProblem& p, std::span<const double> f, double lo, double hi);

/// Chart dimension 0..2 (Bernoulli N <= 3, Markov1 N <= 2): the feasible
/// set is clipped exactly and the quasi-concave objective maximized by
/// nested golden-section search seeded on a 1e-2 grid. Larger charts: the
/// concave dual min_lambda max_w [h + psi_lambda . w] by damped Newton,
/// wrapped in Dinkelbach iterations for the Dimension form.
/// Throws InfeasibleConstraint when no measure of the family satisfies the
/// constraints.
VariationalResult solve_cell_problem(const CellProblem& problem, VariationalForm form);

}  // namespace mfspec
